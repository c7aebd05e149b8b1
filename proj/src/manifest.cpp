#include "windgrid/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& text) { return fnv1a64(text.data(), text.size()); }

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::input("cannot read file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x00000100000001B3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    return h;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::input("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw Error::input("cannot create directory " + target.parent_path().string() +
                                   ": " + ec.message());
    }
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error::input("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error::input("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error::input("cannot rename " + tmp.string() + " to " + path + ": " +
                               ec.message());
}

void manifest_add(std::vector<ManifestFile>& list, const std::string& role,
                  const std::string& path, const std::string& stored_as) {
    ManifestFile f;
    f.role = role;
    f.path = stored_as;
    f.hash = hash_hex(hash_file(path));
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    f.bytes = ec ? 0 : static_cast<std::uint64_t>(size);
    list.push_back(std::move(f));
}

namespace {

json files_to_json(const std::vector<ManifestFile>& files) {
    json arr = json::array();
    for (const ManifestFile& f : files)
        arr.push_back({{"role", f.role}, {"path", f.path}, {"hash", f.hash}, {"bytes", f.bytes}});
    return arr;
}

std::vector<ManifestFile> files_from_json(const json& arr, const std::string& source) {
    if (!arr.is_array()) throw Error::input(source + ": manifest file list is not an array");
    std::vector<ManifestFile> files;
    for (const json& e : arr) {
        ManifestFile f;
        f.role = e.at("role").get<std::string>();
        f.path = e.at("path").get<std::string>();
        f.hash = e.at("hash").get<std::string>();
        f.bytes = e.value("bytes", std::uint64_t{0});
        files.push_back(std::move(f));
    }
    return files;
}

}  // namespace

std::string manifest_to_json(const PipelineManifest& m) {
    json doc;
    doc["schema"] = "pipeline-manifest/1";
    doc["tool_version"] = m.tool_version;
    doc["created"] = m.created;
    doc["seed"] = m.seed;
    if (m.config.empty()) {
        doc["config"] = nullptr;
    } else {
        json cfg = json::parse(m.config, nullptr, false);
        doc["config"] = cfg.is_discarded() ? json(m.config) : cfg;
    }
    doc["inputs"] = files_to_json(m.inputs);
    doc["outputs"] = files_to_json(m.outputs);
    json stages = json::array();
    for (const ManifestStage& s : m.stages)
        stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
    doc["stages"] = stages;
    return doc.dump(2) + "\n";
}

PipelineManifest manifest_from_json(const std::string& text, const std::string& source) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error::input(source + ": malformed JSON");
    if (doc.value("schema", "") != "pipeline-manifest/1")
        throw Error::input(source + ": not a pipeline manifest (schema mismatch)");
    PipelineManifest m;
    m.tool_version = doc.value("tool_version", "");
    m.created = doc.value("created", "");
    m.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("config") && !doc["config"].is_null())
        m.config = doc["config"].is_string() ? doc["config"].get<std::string>()
                                             : doc["config"].dump();
    m.inputs = files_from_json(doc.value("inputs", json::array()), source);
    m.outputs = files_from_json(doc.value("outputs", json::array()), source);
    if (doc.contains("stages")) {
        for (const json& e : doc["stages"]) {
            ManifestStage s;
            s.name = e.at("name").get<std::string>();
            s.seconds = e.value("seconds", 0.0);
            m.stages.push_back(std::move(s));
        }
    }
    return m;
}

void save_manifest(const PipelineManifest& m, const std::string& path) {
    write_text_atomic(path, manifest_to_json(m));
}

PipelineManifest load_manifest(const std::string& path) {
    return manifest_from_json(read_text_file(path), path);
}

void verify_manifest(const PipelineManifest& m, const std::string& base_dir) {
    for (const ManifestFile& f : m.outputs) {
        fs::path p(f.path);
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        std::uint64_t h;
        try {
            h = hash_file(p.string());
        } catch (const Error&) {
            throw Error::integrity("manifest output missing: " + p.string());
        }
        if (hash_hex(h) != f.hash)
            throw Error::integrity("manifest output modified since it was written: " + p.string());
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace windgrid
