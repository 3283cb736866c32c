#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gridcast::nn {

/// On-disk model: a kind tag, ordered key/value header, and the flat
/// parameter vector.
///
///   gridcast-model 1
///   kind <kind>
///   <key> <value>          (zero or more)
///   params <count>
///   <value>                (count lines, shortest round-trip decimal)
///   end
///
/// Values are written with the shortest representation that parses back to
/// the identical double, so a save/load round trip is bit-exact.
struct ModelFile {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<double> params;

    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;
    /// Throws Error(Parse) when the key is absent.
    std::string require(const std::string& key) const;
};

void write_model_file(std::ostream& out, const ModelFile& file);
void write_model_file(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model_file(std::istream& in);
ModelFile read_model_file(const std::filesystem::path& path);

}  // namespace gridcast::nn
