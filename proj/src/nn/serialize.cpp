#include "gridcast/nn/serialize.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::nn {

namespace {
constexpr const char* kMagic = "gridcast-model";
constexpr int kVersion = 1;
}  // namespace

void ModelFile::set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos)
        throw Error(Errc::InvalidArgument, "model header keys must be single tokens and values single lines");
    for (auto& [k, v] : header)
        if (k == key) {
            v = value;
            return;
        }
    header.emplace_back(key, value);
}

std::optional<std::string> ModelFile::get(const std::string& key) const {
    for (const auto& [k, v] : header)
        if (k == key) return v;
    return std::nullopt;
}

std::string ModelFile::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw Error(Errc::Parse, "model file has no '" + key + "' entry");
    return *v;
}

void write_model_file(std::ostream& out, const ModelFile& file) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "kind " << file.kind << '\n';
    for (const auto& [k, v] : file.header) out << k << ' ' << v << '\n';
    out << "params " << file.params.size() << '\n';
    for (double p : file.params) out << csv::format_double(p) << '\n';
    out << "end\n";
}

void write_model_file(const std::filesystem::path& path, const ModelFile& file) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    write_model_file(out, file);
}

ModelFile read_model_file(std::istream& in) {
    std::string line;
    const auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw Error(Errc::Parse, std::string("model file truncated before ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    next("magic");
    if (line != std::string(kMagic) + " " + std::to_string(kVersion))
        throw Error(Errc::Parse, "not a gridcast model file (bad magic line)");

    ModelFile file;
    next("kind");
    if (line.rfind("kind ", 0) != 0) throw Error(Errc::Parse, "model file missing kind");
    file.kind = line.substr(5);

    while (true) {
        next("params");
        const auto space = line.find(' ');
        if (space == std::string::npos) throw Error(Errc::Parse, "malformed header line '" + line + "'");
        const std::string key = line.substr(0, space), value = line.substr(space + 1);
        if (key == "params") {
            std::size_t count = 0;
            try {
                count = std::stoul(value);
            } catch (const std::exception&) {
                throw Error(Errc::Parse, "bad parameter count");
            }
            file.params.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                next("end of parameters");
                auto v = csv::parse_double(line);
                if (!v) throw Error(Errc::Parse, "bad parameter value '" + line + "'");
                file.params.push_back(*v);
            }
            next("end marker");
            if (line != "end") throw Error(Errc::Parse, "missing end marker");
            return file;
        }
        file.header.emplace_back(key, value);
    }
}

ModelFile read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    return read_model_file(in);
}

}  // namespace gridcast::nn
