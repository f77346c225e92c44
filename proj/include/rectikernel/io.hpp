#pragma once

// Point-cloud CSV (`x,y,w`) and GeneratorSpec JSON manifests. Doubles are
// written in shortest round-trip form, so save followed by load is exact.

#include "rectikernel/generators.hpp"
#include "rectikernel/measure.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace rectikernel {

/// Unreadable/unwritable files and malformed file contents.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string measure_to_csv(const DiscreteMeasure& mu);
/// Throws IoError on malformed text; std::invalid_argument if the rows do not
/// form a valid measure.
[[nodiscard]] DiscreteMeasure measure_from_csv(const std::string& text);

void save_measure(const DiscreteMeasure& mu, const std::filesystem::path& path);
[[nodiscard]] DiscreteMeasure load_measure(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json spec_to_json(const GeneratorSpec& spec);
/// Throws std::invalid_argument on unknown variants, bad types, or failed validation.
[[nodiscard]] GeneratorSpec spec_from_json(const nlohmann::json& j);

void save_spec(const GeneratorSpec& spec, const std::filesystem::path& path);
[[nodiscard]] GeneratorSpec load_spec(const std::filesystem::path& path);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64 of a byte string, hex encoded; used for input hashes in manifests.
[[nodiscard]] std::string content_hash(const std::string& bytes);

}  // namespace rectikernel
