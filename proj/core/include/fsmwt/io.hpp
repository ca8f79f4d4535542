// Artifact serialization: channel and result JSON, CSV emission, golden hex
// dumps. All output is locale-independent and byte-stable for fixed inputs.
#pragma once

#include <fsmwt/capacity.hpp>
#include <fsmwt/channels.hpp>
#include <fsmwt/codec.hpp>
#include <fsmwt/infotheory.hpp>
#include <fsmwt/region.hpp>
#include <fsmwt/simulate.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fsmwt::io {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal for a double, '.' decimal point, C locale.
std::string format_double(double v);

// FNV-1a 64-bit over a string; used to stamp parameter sets into artifacts.
uint64_t fnv1a(std::string_view s);
std::string hash_hex(uint64_t h);

// ============================================================================
// JSON
// ============================================================================

// Channel tables carry an "axes" field ("s,x,y,z") naming the row-major
// nesting order.
json channel_to_json(const channels::DiscreteWiretapChannel &ch);
channels::DiscreteWiretapChannel channel_from_json(const json &j);
channels::DiscreteWiretapChannel channel_from_json_file(const std::string &path);

json joint_to_json(const infotheory::JointTable &t);

json capacity_result_to_json(const capacity::CapacityResult &r, const json &params);
json run_report_to_json(const codec::RunReport &r);

void write_json_file(const std::string &path, const json &j);
void append_json_line(const std::string &path, const json &j);

// ============================================================================
// CSV (comma-separated, header row, '.' decimal, LF endings)
// ============================================================================

std::string boundary_to_csv(const region::RegionBoundary &b, std::string_view params_hash);
std::string sweep_to_csv(const std::vector<simulate::SweepRecord> &records);

void write_text_file(const std::string &path, std::string_view content);

// ============================================================================
// Plot scripts and golden vectors
// ============================================================================

// gnuplot script drawing capacity vs d, one curve per u, straight from the
// sweep CSV; the script references only the CSV path.
std::string sweep_plot_script(const std::string &csv_path, const std::string &out_png);

// Hex dump of a symbol block (two hex digits per symbol), seed recorded on
// the first line. Used for codec golden vectors.
std::string hex_dump(const std::vector<int> &symbols, uint64_t seed);
std::vector<int> hex_parse(std::string_view dump, uint64_t *seed_out = nullptr);

} // namespace fsmwt::io
