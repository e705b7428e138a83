#include "credigraph/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "credigraph/rng.hpp"

namespace credigraph {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one delimited line; double quotes group a field ("" is a literal quote).
std::vector<std::string> split_fields(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

enum class ScoreParse { kAbsent, kOk, kBad };

ScoreParse parse_score(std::string_view text, double& value) {
    text = trim(text);
    if (text.empty()) {
        return ScoreParse::kAbsent;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return ScoreParse::kBad;
    }
    return value >= 0.0 && value <= 1.0 ? ScoreParse::kOk : ScoreParse::kBad;
}

std::string score_cell(const std::optional<double>& v) {
    if (!v) {
        return {};
    }
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
}

}  // namespace

std::string_view to_string(Target t) noexcept { return t == Target::kPc1 ? "pc1" : "mbfc"; }

Target parse_target(std::string_view name) {
    const std::string n = lower(name);
    if (n == "pc1") return Target::kPc1;
    if (n == "mbfc") return Target::kMbfc;
    throw ParameterError("unknown target `" + std::string(name) + "` (expected pc1 or mbfc)");
}

LoadedLabels parse_dqr(std::string_view contents) {
    std::istringstream in{std::string(contents)};
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError("label file is empty");
    }
    const char delim = header.find('\t') != std::string::npos && header.find(',') == std::string::npos ? '\t' : ',';
    const auto names = split_fields(header, delim);
    std::optional<std::size_t> col_domain, col_pc1, col_mbfc;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string n = lower(names[i]);
        if (n == "domain") col_domain = i;
        if (n == "pc1") col_pc1 = i;
        if (n == "mbfc") col_mbfc = i;
    }
    if (!col_domain || !col_pc1 || !col_mbfc) {
        throw FormatError("label file header must name `domain`, `pc1` and `mbfc` columns");
    }
    const std::size_t needed = std::max({*col_domain, *col_pc1, *col_mbfc}) + 1;

    LoadedLabels out;
    std::map<std::string, CredibilityLabel> by_key;
    std::string line;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++out.report.rows;
        auto fields = split_fields(line, delim);
        fields.resize(std::max(fields.size(), needed));
        std::string domain = fields[*col_domain];
        if (domain.find("://") == std::string::npos) {
            domain = "http://" + domain;
        }
        auto host = normalize_host(domain);
        if (!host) {
            ++out.report.rejected_domain;
            out.report.warnings.push_back("line " + std::to_string(line_no) + ": rejected domain `" +
                                          fields[*col_domain] + "` (" + std::string(to_string(host.reason)) + ")");
            continue;
        }
        CredibilityLabel label{*host.key, std::nullopt, std::nullopt};
        double v = 0.0;
        bool bad = false;
        for (auto [col, slot] : {std::pair{*col_pc1, &label.pc1}, std::pair{*col_mbfc, &label.mbfc}}) {
            switch (parse_score(fields[col], v)) {
                case ScoreParse::kOk: *slot = v; break;
                case ScoreParse::kBad: bad = true; break;
                case ScoreParse::kAbsent: break;
            }
        }
        if (bad) {
            ++out.report.rejected_range;
            out.report.warnings.push_back("line " + std::to_string(line_no) + ": score outside [0, 1]");
            continue;
        }
        if (!label.pc1 && !label.mbfc) {
            ++out.report.rejected_empty;
            continue;
        }
        auto [it, inserted] = by_key.insert_or_assign(label.node.str(), label);
        if (!inserted) {
            ++out.report.duplicates;
            out.report.warnings.push_back("line " + std::to_string(line_no) + ": duplicate domain `" +
                                          label.node.str() + "`, keeping the later row");
        }
    }
    for (auto& [k, v] : by_key) {
        out.labels.push_back(std::move(v));
    }
    out.report.accepted = out.labels.size();
    return out;
}

LoadedLabels load_dqr(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open label file `" + path.string() + "`");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dqr(buf.str());
}

JoinResult join_labels(RecordSource<std::string>& dictionary, const std::vector<CredibilityLabel>& labels) {
    std::vector<const CredibilityLabel*> sorted;
    sorted.reserve(labels.size());
    for (const auto& l : labels) {
        sorted.push_back(&l);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->node < b->node; });

    JoinResult result;
    std::optional<std::string> key = dictionary.next();
    NodeId id = 0;
    for (const CredibilityLabel* label : sorted) {
        while (key && *key < label->node.str()) {
            key = dictionary.next();
            ++id;
        }
        if (key && *key == label->node.str()) {
            result.matched.push_back(LabeledNode{id, *label});
        } else {
            result.unmatched.push_back(label->node.str());
        }
    }
    return result;
}

JoinResult join_labels(const NodeDictionary& dictionary, const std::vector<CredibilityLabel>& labels) {
    VectorSource<std::string> source(dictionary.keys());
    return join_labels(source, labels);
}

void write_labels_tsv(const std::filesystem::path& path, const JoinResult& joined) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + path.string() + "`");
    }
    out << "node_key\tnode_id\tpc1\tmbfc\n";
    for (const auto& m : joined.matched) {
        out << m.label.node.str() << '\t' << m.id << '\t' << score_cell(m.label.pc1) << '\t'
            << score_cell(m.label.mbfc) << '\n';
    }
}

std::vector<LabeledNode> read_labels_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    std::string line;
    if (!std::getline(in, line) || line != "node_key\tnode_id\tpc1\tmbfc") {
        throw FormatError("`" + path.string() + "` is not a joined-label file");
    }
    std::vector<LabeledNode> out;
    while (std::getline(in, line)) {
        const auto f = split_fields(line, '\t');
        if (f.size() != 4) {
            throw FormatError("malformed joined-label line `" + line + "`");
        }
        auto key = NodeKey::from_reversed(f[0]);
        if (!key) {
            throw FormatError("invalid node key `" + f[0] + "`");
        }
        LabeledNode n;
        n.label.node = *key;
        n.id = std::stoull(f[1]);
        double v = 0.0;
        if (parse_score(f[2], v) == ScoreParse::kOk) n.label.pc1 = v;
        if (parse_score(f[3], v) == ScoreParse::kOk) n.label.mbfc = v;
        out.push_back(std::move(n));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t stratum_of(double score) noexcept {
    const auto bin = static_cast<std::size_t>(std::floor(score * static_cast<double>(kStrata)));
    return std::min(bin, kStrata - 1);
}

RegressionSplit stratified_split(const std::vector<CredibilityLabel>& labels, Target target, std::uint64_t seed,
                                 std::array<double, 3> ratios) {
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9 ||
        std::any_of(ratios.begin(), ratios.end(), [](double r) { return r < 0.0; })) {
        throw ParameterError("split ratios must be non-negative and sum to 1");
    }
    std::array<std::vector<std::string>, kStrata> strata;
    std::size_t total = 0;
    for (const auto& l : labels) {
        if (const auto s = l.score(target)) {
            strata[stratum_of(*s)].push_back(l.node.str());
            ++total;
        }
    }
    if (total < 10) {
        throw ParameterError("stratified split needs at least 10 labelled nodes, got " + std::to_string(total));
    }

    // Units beyond the per-stratum floors that each part should receive overall.
    std::array<std::int64_t, 3> quota{};
    quota[0] = std::llround(ratios[0] * static_cast<double>(total));
    quota[1] = std::llround(ratios[1] * static_cast<double>(total));
    quota[2] = static_cast<std::int64_t>(total) - quota[0] - quota[1];
    const auto floors = [&](std::size_t n) {
        std::array<std::int64_t, 3> f{};
        for (std::size_t i = 0; i < 3; ++i) {
            f[i] = static_cast<std::int64_t>(std::floor(ratios[i] * static_cast<double>(n) + 1e-9));
        }
        return f;
    };
    std::array<std::int64_t, 3> extras = quota;
    for (const auto& s : strata) {
        const auto f = floors(s.size());
        for (std::size_t i = 0; i < 3; ++i) extras[i] -= f[i];
    }

    RegressionSplit split;
    split.target = target;
    split.seed = seed;
    split.ratios = ratios;
    std::array<std::vector<std::string>*, 3> parts{&split.train, &split.val, &split.test};
    for (std::size_t k = 0; k < kStrata; ++k) {
        auto& members = strata[k];
        if (members.empty()) {
            continue;
        }
        std::sort(members.begin(), members.end());
        SplitMix64 rng(mix_seed(seed, k));
        seeded_shuffle(members, rng);

        auto take = floors(members.size());
        std::int64_t leftover = static_cast<std::int64_t>(members.size()) - take[0] - take[1] - take[2];
        std::array<bool, 3> bumped{};
        while (leftover-- > 0) {
            std::size_t best = 3;
            for (std::size_t i = 0; i < 3; ++i) {
                if (!bumped[i] && (best == 3 || extras[i] > extras[best])) {
                    best = i;
                }
            }
            bumped[best] = true;
            ++take[best];
            --extras[best];
        }
        std::size_t pos = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::int64_t j = 0; j < take[i]; ++j) {
                parts[i]->push_back(std::move(members[pos++]));
            }
        }
    }
    return split;
}

nlohmann::json RegressionSplit::to_json() const {
    return nlohmann::json{
        {"format", "CGSPLIT1"},
        {"target", to_string(target)},
        {"seed", seed},
        {"ratios", ratios},
        {"strata", kStrata},
        {"shuffle", "splitmix64/fisher-yates"},
        {"train", train},
        {"val", val},
        {"test", test},
    };
}

RegressionSplit RegressionSplit::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "CGSPLIT1") {
        throw FormatError("not a CGSPLIT1 split file (bad or missing version header)");
    }
    RegressionSplit s;
    s.target = parse_target(j.at("target").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratios = j.at("ratios").get<std::array<double, 3>>();
    s.train = j.at("train").get<std::vector<std::string>>();
    s.val = j.at("val").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
}

void RegressionSplit::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create split file `" + path.string() + "`");
    }
    out << to_json().dump(1) << '\n';
}

RegressionSplit RegressionSplit::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open split file `" + path.string() + "`");
    }
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw FormatError("split file `" + path.string() + "` is not JSON");
    }
    return from_json(j);
}

}  // namespace credigraph
