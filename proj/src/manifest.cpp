#include "credigraph/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include "credigraph/errors.hpp"

namespace credigraph {

namespace {

class Sha256 {
   public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("SHA-256 initialisation failed");
        }
    }
    void update(std::string_view bytes) { EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += kDigits[md[i] >> 4];
            out += kDigits[md[i] & 15];
        }
        return out;
    }

   private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void hash_file_into(Sha256& h, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    std::string buf(1 << 16, '\0');
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
}

nlohmann::json entry_json(const ManifestEntry& e) {
    return {{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}};
}

ManifestEntry entry_from(const nlohmann::json& j) {
    return {j.at("path").get<std::string>(), j.value("sha256", ""), j.value("bytes", std::uint64_t{0})};
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    Sha256 h;
    hash_file_into(h, path);
    return h.hex();
}

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex();
}

ManifestEntry describe_path(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) {
        throw IoError("`" + path.string() + "` does not exist");
    }
    if (!fs::is_directory(path)) {
        return {path.string(), sha256_file(path), fs::file_size(path)};
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file()) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    Sha256 h;
    std::uint64_t bytes = 0;
    for (const auto& f : files) {
        h.update(fs::relative(f, path).generic_string());
        h.update(std::string_view("\0", 1));
        h.update(sha256_file(f));
        bytes += fs::file_size(f);
    }
    return {path.string(), h.hex(), bytes};
}

std::string run_hash(std::string_view command, const std::vector<ManifestEntry>& inputs,
                     const nlohmann::json& config) {
    Sha256 h;
    h.update(command);
    h.update(std::string_view("\0", 1));
    for (const auto& e : inputs) {
        h.update(e.sha256);
        h.update(std::string_view("\0", 1));
    }
    h.update(config.dump());
    return h.hex();
}

nlohmann::json JobManifest::to_json() const {
    nlohmann::json in = nlohmann::json::array();
    for (const auto& e : inputs) {
        in.push_back(entry_json(e));
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : outputs) {
        out.push_back(entry_json(e));
    }
    return {{"format", "CGJOB1"},
            {"command", command},
            {"inputs", in},
            {"outputs", out},
            {"config", config},
            {"run_hash", run_hash},
            {"started", format_timestamp(started)},
            {"finished", format_timestamp(finished)},
            {"counters", counters}};
}

JobManifest JobManifest::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "CGJOB1") {
        throw FormatError("not a CGJOB1 job manifest (bad or missing version header)");
    }
    JobManifest m;
    m.command = j.at("command").get<std::string>();
    for (const auto& e : j.at("inputs")) {
        m.inputs.push_back(entry_from(e));
    }
    for (const auto& e : j.at("outputs")) {
        m.outputs.push_back(entry_from(e));
    }
    m.config = j.value("config", nlohmann::json::object());
    m.run_hash = j.at("run_hash").get<std::string>();
    m.started = parse_timestamp(j.at("started").get<std::string>());
    m.finished = parse_timestamp(j.at("finished").get<std::string>());
    m.counters = j.value("counters", std::map<std::string, std::uint64_t>{});
    return m;
}

void JobManifest::save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw IoError("cannot create `" + tmp + "`");
        }
        out << to_json().dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

JobManifest JobManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw FormatError("`" + path.string() + "` is not JSON");
    }
    return from_json(j);
}

bool is_up_to_date(const std::filesystem::path& manifest_path, const std::string& hash) {
    if (!std::filesystem::exists(manifest_path)) {
        return false;
    }
    try {
        const auto m = JobManifest::load(manifest_path);
        if (m.run_hash != hash) {
            return false;
        }
        for (const auto& o : m.outputs) {
            if (!std::filesystem::exists(o.path) || describe_path(o.path).sha256 != o.sha256) {
                return false;
            }
        }
        return true;
    } catch (const InputError&) {
        return false;
    }
}

}  // namespace credigraph
