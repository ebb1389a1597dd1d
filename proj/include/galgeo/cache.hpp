#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "galgeo/errors.hpp"
#include "galgeo/rng.hpp"

namespace galgeo {

// On-disk cache of expensive enumerations, guarded by a versioned manifest
// and per-entry checksums. A corrupt or version-skewed entry degrades to a
// miss (with a warning) rather than a silently wrong read.
class Cache {
public:
    static constexpr int kFormatVersion = 1;

    explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }

    void store(const std::string& kind, const std::map<std::string, u64>& params,
               const std::string& content) {
        std::filesystem::create_directories(dir_);
        nlohmann::ordered_json manifest = load_manifest();
        if (!manifest.contains("entries")) manifest["entries"] = nlohmann::ordered_json::object();
        manifest["version"] = kFormatVersion;

        std::string file = file_name(kind, params);
        {
            std::ofstream os(dir_ / file, std::ios::binary);
            if (!os) throw error("cannot write cache file " + (dir_ / file).string());
            os << content;
        }
        manifest["entries"][key_of(kind, params)] = {{"file", file},
                                                     {"checksum", checksum(content)}};
        std::ofstream ms(dir_ / "manifest.json", std::ios::binary);
        if (!ms) throw error("cannot write cache manifest in " + dir_.string());
        ms << manifest.dump(2) << "\n";
    }

    std::optional<std::string> load(const std::string& kind,
                                    const std::map<std::string, u64>& params,
                                    std::ostream* warn = nullptr) const {
        nlohmann::ordered_json manifest = load_manifest();
        if (!manifest.is_object() || manifest.value("version", -1) != kFormatVersion)
            return std::nullopt;
        auto entries = manifest.find("entries");
        if (entries == manifest.end()) return std::nullopt;
        auto it = entries->find(key_of(kind, params));
        if (it == entries->end()) return std::nullopt;

        std::filesystem::path file = dir_ / it->value("file", "");
        std::ifstream is(file, std::ios::binary);
        if (!is) return std::nullopt;
        std::ostringstream buf;
        buf << is.rdbuf();
        std::string content = buf.str();
        if (checksum(content) != it->value("checksum", "")) {
            if (warn)
                *warn << "warning: cache entry " << key_of(kind, params)
                      << " failed its checksum; treating as a miss\n";
            return std::nullopt;
        }
        return content;
    }

    static std::string key_of(const std::string& kind, const std::map<std::string, u64>& params) {
        std::ostringstream os;
        os << kind;
        for (const auto& [k, v] : params) os << ' ' << k << '=' << v;
        return os.str();
    }

private:
    static std::string checksum(const std::string& content) {
        std::ostringstream os;
        os << std::hex << fnv1a64(content);
        return os.str();
    }

    static std::string file_name(const std::string& kind,
                                 const std::map<std::string, u64>& params) {
        std::ostringstream os;
        os << kind;
        for (const auto& [k, v] : params) os << '_' << k << v;
        os << ".txt";
        return os.str();
    }

    nlohmann::ordered_json load_manifest() const {
        std::ifstream is(dir_ / "manifest.json");
        if (!is) return nlohmann::ordered_json::object();
        try {
            return nlohmann::ordered_json::parse(is);
        } catch (const nlohmann::json::parse_error&) {
            return nlohmann::ordered_json::object();
        }
    }

    std::filesystem::path dir_;
};

}  // namespace galgeo
