#include "salnet/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include <json.hpp>

namespace salnet {

std::string git_blob_hash(std::string_view contents) {
    const std::string header = "blob " + std::to_string(contents.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha1: out of memory");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, contents.data(), contents.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("sha1: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const ExperimentSpec& spec, const std::vector<RunSeed>& seeds) {
    RunManifest m;
    m.kind = std::string(to_string(spec.kind));
    m.params = list_params(spec);
    const auto defaults = list_params(default_spec(spec.kind));
    for (std::size_t i = 0; i < m.params.size(); ++i)
        if (m.params[i].second != defaults[i].second) m.overrides.push_back(m.params[i].first);
    m.master_seed = spec.seed;
    m.run_seeds = seeds;
    m.started = utc_timestamp();
    m.status = "running";
    return m;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["version"] = m.version;
    j["kind"] = m.kind;
    j["master_seed"] = m.master_seed;
    auto& params = j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.params) params[k] = v;
    j["overrides"] = m.overrides;
    auto& seeds = j["run_seeds"] = nlohmann::ordered_json::array();
    for (const auto& s : m.run_seeds) seeds.push_back({{"label", s.label}, {"seed", s.seed}});
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["status"] = m.status;
    auto& outputs = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"sha1", o.hash}});
    return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
    try {
        const auto j = nlohmann::ordered_json::parse(text);
        RunManifest m;
        m.version = j.at("version").get<std::string>();
        m.kind = j.at("kind").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        for (const auto& [k, v] : j.at("params").items()) m.params.emplace_back(k, v.get<std::string>());
        m.overrides = j.at("overrides").get<std::vector<std::string>>();
        for (const auto& s : j.at("run_seeds"))
            m.run_seeds.push_back({s.at("label").get<std::string>(), s.at("seed").get<std::uint64_t>()});
        m.started = j.at("started").get<std::string>();
        m.finished = j.at("finished").get<std::string>();
        m.status = j.at("status").get<std::string>();
        for (const auto& o : j.at("outputs"))
            m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha1").get<std::string>()});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("manifest: ") + e.what());
    }
}

ExperimentSpec spec_from_manifest(const RunManifest& m) {
    ExperimentSpec spec = default_spec(parse_kind(m.kind));
    for (const auto& [k, v] : m.params) set_param(spec, k, v);
    return spec;
}

}  // namespace salnet
