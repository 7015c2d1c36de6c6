#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sitehunt/engine.hpp"

namespace sitehunt {

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Execution records are JSON documents with a fixed field order and a
// "record_version" field. serialize_record output is byte-stable: two equal
// records always serialize to identical text.

nlohmann::ordered_json to_json(const WebsiteScore& score);
nlohmann::ordered_json to_json(const SeedRecord& seed);
nlohmann::ordered_json to_json(const CycleRecord& cycle);
nlohmann::ordered_json to_json(const ExecutionConfig& config);
nlohmann::ordered_json to_json(const DiscoveredWebsite& site);
nlohmann::ordered_json to_json(const ExecutionRecord& record);

/// Pretty-printed with two-space indent and a trailing newline.
std::string serialize_record(const ExecutionRecord& record);
ExecutionRecord parse_record(std::string_view text);
ExecutionRecord load_record(const std::filesystem::path& path);

}  // namespace sitehunt
