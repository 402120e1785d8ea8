#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "falsify/analysis.hpp"
#include "falsify/orchestrator.hpp"

namespace falsify {

// A campaign file: the campaign plus where its artifacts go.
struct CampaignFile {
  CampaignConfig config;
  std::string output_dir = "falsify-out";
};

// Parses and validates a campaign document. Unknown keys, missing required
// sections, unresolvable names, cyclic rulebooks and invalid values all
// raise ConfigError.
CampaignFile parse_campaign(const nlohmann::json& doc);
CampaignFile load_campaign(const std::filesystem::path& path);

// Canonical document; parse_campaign(campaign_to_json(f)) reproduces f.
nlohmann::json campaign_to_json(const CampaignFile& file);

// Example document for a catalog scenario or landscape id.
nlohmann::json example_campaign(const std::string& id);

nlohmann::json to_json(const SamplerSnapshot& snap);
SamplerSnapshot snapshot_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SampleRecord& rec);
SampleRecord record_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CampaignStats& stats, bool include_ci);

// Header-bearing CSV of one table.
void write_table_csv(std::ostream& out, const FeatureSpace& space, const std::vector<std::string>& metric_names,
                     const std::vector<SampleRecord>& table);

// Writes error.csv, safe.csv, records.jsonl, summary.json and
// sampler_snapshot.json (plus checkpoints.jsonl, failed.jsonl and
// trajectories.jsonl when present) into `dir`.
void write_run(const std::filesystem::path& dir, const CampaignFile& file, const CampaignResult& result);

// A run directory read back from disk.
struct RunArtifacts {
  nlohmann::json summary;
  CampaignFile campaign;
  std::vector<SampleRecord> records;
};

// Throws ConfigError when artifacts are missing or malformed.
RunArtifacts read_run(const std::filesystem::path& dir);

std::vector<std::string> metric_names(const CampaignConfig& config);

}  // namespace falsify
