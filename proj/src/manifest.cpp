#include "chaleval/manifest.hpp"

#include "chaleval/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace chaleval {

using nlohmann::json;

const char* to_string(StructureKind kind) noexcept
{
    switch (kind) {
    case StructureKind::direct: return "direct";
    case StructureKind::union_of: return "union";
    case StructureKind::interface: return "interface";
    }
    return "?";
}

const char* to_string(Direction direction) noexcept
{
    return direction == Direction::higher_better ? "higher-better" : "lower-better";
}

std::optional<Direction> known_metric_direction(std::string_view metric)
{
    if (metric == "DSC")
        return Direction::higher_better;
    if (metric == "ASSD")
        return Direction::lower_better;
    return std::nullopt;
}

namespace {

[[noreturn]] void bad(const std::string& msg)
{
    throw Error(ErrorCode::invalid_manifest, msg);
}

StructureKind parse_kind(const std::string& s)
{
    if (s == "direct")
        return StructureKind::direct;
    if (s == "union")
        return StructureKind::union_of;
    if (s == "interface")
        return StructureKind::interface;
    bad("unknown structure kind '" + s + "'");
}

Direction parse_direction(const std::string& s)
{
    if (s == "higher-better")
        return Direction::higher_better;
    if (s == "lower-better")
        return Direction::lower_better;
    bad("unknown metric direction '" + s + "'");
}

std::string substitute(std::string templ, std::string_view key, std::string_view value)
{
    for (std::size_t pos = templ.find(key); pos != std::string::npos; pos = templ.find(key, pos + value.size()))
        templ.replace(pos, key.size(), value);
    return templ;
}

} // namespace

void ChallengeManifest::validate() const
{
    if (scheme.empty())
        bad("label scheme name is empty");
    std::set<int> ids;
    for (const auto& l : labels) {
        if (l.id <= 0)
            bad("label '" + l.name + "' must have a positive id (0 is background)");
        if (!ids.insert(l.id).second)
            bad("duplicate label id " + std::to_string(l.id));
    }
    if (structures.empty())
        bad("no structures declared");
    std::set<std::string> direct_seen;
    std::set<std::string> names;
    for (const auto& s : structures) {
        if (!names.insert(s.name).second)
            bad("duplicate structure '" + s.name + "'");
        if (s.kind == StructureKind::direct) {
            if (s.labels.empty())
                bad("direct structure '" + s.name + "' has no label ids");
            for (int id : s.labels)
                if (!ids.count(id))
                    bad("structure '" + s.name + "' uses undeclared label " + std::to_string(id));
            direct_seen.insert(s.name);
            continue;
        }
        if (s.kind == StructureKind::interface && s.operands.size() != 2)
            bad("interface structure '" + s.name + "' needs exactly two operands");
        if (s.kind == StructureKind::union_of && s.operands.empty())
            bad("union structure '" + s.name + "' has no operands");
        for (const auto& op : s.operands)
            if (!direct_seen.count(op))
                bad("structure '" + s.name + "' references '" + op + "', which is not a previously declared direct structure");
    }
    if (metrics.empty())
        bad("no metrics declared");
    std::set<std::string> metric_names;
    for (const auto& m : metrics) {
        const auto expected = known_metric_direction(m.name);
        if (!expected)
            bad("unknown metric '" + m.name + "' (supported: DSC, ASSD)");
        if (*expected != m.direction)
            bad("metric '" + m.name + "' must be " + to_string(*expected));
        if (!metric_names.insert(m.name).second)
            bad("duplicate metric '" + m.name + "'");
    }
    if (!(penalty_mm > 0.0))
        bad("penalty_mm must be positive");
    std::set<std::string> case_set(cases.begin(), cases.end());
    if (case_set.size() != cases.size())
        bad("duplicate case ids");
    std::set<std::string> team_set(teams.begin(), teams.end());
    if (team_set.size() != teams.size())
        bad("duplicate team ids");
    for (const auto& [better, worse] : dominance)
        if (!team_set.count(better) || !team_set.count(worse))
            bad("dominance pair references unknown team");
    if (ranked_cells().empty())
        bad("no ranked (structure, metric) pairs");
}

const StructureSpec& ChallengeManifest::structure(std::string_view name) const
{
    for (const auto& s : structures)
        if (s.name == name)
            return s;
    throw Error(ErrorCode::unknown_structure, std::string(name));
}

bool ChallengeManifest::has_label(int id) const noexcept
{
    return id == 0 || std::any_of(labels.begin(), labels.end(), [id](const LabelEntry& l) { return l.id == id; });
}

std::vector<MetricSpec> ChallengeManifest::metrics_for(const StructureSpec& s) const
{
    if (s.kind != StructureKind::interface)
        return metrics;
    std::vector<MetricSpec> out;
    for (const auto& m : metrics)
        if (m.name == "ASSD")
            out.push_back(m);
    return out;
}

std::vector<std::pair<std::string, std::string>> ChallengeManifest::ranked_cells() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : structures) {
        if (!s.ranked)
            continue;
        for (const auto& m : metrics_for(s))
            out.emplace_back(s.name, m.name);
    }
    return out;
}

std::filesystem::path ChallengeManifest::ground_truth_file(std::string_view case_id) const
{
    return base_dir / substitute(ground_truth_path, "{case}", case_id);
}

std::filesystem::path ChallengeManifest::prediction_file(std::string_view team, std::string_view case_id) const
{
    return base_dir / substitute(substitute(prediction_path, "{team}", team), "{case}", case_id);
}

ChallengeManifest parse_manifest(std::string_view json_text, std::filesystem::path base_dir)
{
    ChallengeManifest m;
    m.base_dir = std::move(base_dir);
    try {
        const json j = json::parse(json_text);
        const json& scheme = j.at("label_scheme");
        m.scheme = scheme.at("name").get<std::string>();
        for (const auto& [name, id] : scheme.at("labels").items())
            m.labels.push_back({name, id.get<int>()});
        std::sort(m.labels.begin(), m.labels.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& s : j.at("structures")) {
            StructureSpec spec;
            spec.name = s.at("name").get<std::string>();
            spec.kind = parse_kind(s.at("kind").get<std::string>());
            if (spec.kind == StructureKind::direct)
                spec.labels = s.at("labels").get<std::vector<int>>();
            else
                spec.operands = s.at("operands").get<std::vector<std::string>>();
            spec.ranked = s.value("ranked", true);
            m.structures.push_back(std::move(spec));
        }
        for (const auto& mt : j.at("metrics"))
            m.metrics.push_back({mt.at("name").get<std::string>(), parse_direction(mt.at("direction").get<std::string>())});
        m.penalty_mm = j.value("penalty_mm", 350.0);
        m.cases = j.value("cases", std::vector<std::string>{});
        m.teams = j.value("teams", std::vector<std::string>{});
        m.ground_truth_path = j.value("ground_truth_path", m.ground_truth_path);
        m.prediction_path = j.value("prediction_path", m.prediction_path);
        if (j.contains("dominance")) {
            for (const auto& pair : j.at("dominance"))
                m.dominance.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
        }
    }
    catch (const json::exception& e) {
        bad(e.what());
    }
    m.validate();
    return m;
}

std::string manifest_to_json(const ChallengeManifest& m)
{
    json j;
    json labels = json::object();
    for (const auto& l : m.labels)
        labels[l.name] = l.id;
    j["label_scheme"] = {{"name", m.scheme}, {"labels", labels}};
    json structures = json::array();
    for (const auto& s : m.structures) {
        json js = {{"name", s.name}, {"kind", to_string(s.kind)}};
        if (s.kind == StructureKind::direct)
            js["labels"] = s.labels;
        else
            js["operands"] = s.operands;
        js["ranked"] = s.ranked;
        structures.push_back(std::move(js));
    }
    j["structures"] = std::move(structures);
    json metrics = json::array();
    for (const auto& mt : m.metrics)
        metrics.push_back({{"name", mt.name}, {"direction", to_string(mt.direction)}});
    j["metrics"] = std::move(metrics);
    j["penalty_mm"] = m.penalty_mm;
    j["cases"] = m.cases;
    j["teams"] = m.teams;
    j["ground_truth_path"] = m.ground_truth_path;
    j["prediction_path"] = m.prediction_path;
    json dominance = json::array();
    for (const auto& [better, worse] : m.dominance)
        dominance.push_back({better, worse});
    j["dominance"] = std::move(dominance);
    return j.dump(2) + "\n";
}

ChallengeManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorCode::io, "cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

void save_manifest(const ChallengeManifest& manifest, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::io, "cannot write manifest " + path.string());
    os << manifest_to_json(manifest);
}

ChallengeManifest preset_manifest(std::string_view name)
{
    ChallengeManifest m;
    m.metrics = {{"DSC", Direction::higher_better}, {"ASSD", Direction::lower_better}};
    if (name == "vs_cochlea") {
        m.scheme = "vs_cochlea";
        m.labels = {{"vs", 1}, {"cochlea", 2}};
        m.structures = {
            {"vs", StructureKind::direct, {1}, {}, true},
            {"cochlea", StructureKind::direct, {2}, {}, true},
        };
    }
    else if (name == "vs_split_cochlea") {
        m.scheme = "vs_split_cochlea";
        m.labels = {{"vs_intra", 1}, {"vs_extra", 2}, {"cochlea", 3}};
        m.structures = {
            {"intra", StructureKind::direct, {1}, {}, true},
            {"extra", StructureKind::direct, {2}, {}, true},
            {"cochlea", StructureKind::direct, {3}, {}, true},
            {"vs", StructureKind::union_of, {}, {"intra", "extra"}, false},
            {"split_boundary", StructureKind::interface, {}, {"intra", "extra"}, false},
        };
    }
    else {
        throw Error(ErrorCode::invalid_argument, "unknown preset '" + std::string(name) + "'");
    }
    return m;
}

void check_volume_scheme(const LabelVolume& volume, const ChallengeManifest& manifest)
{
    if (!volume.scheme_id().empty() && volume.scheme_id() != manifest.scheme)
        throw Error(ErrorCode::scheme_mismatch, "volume scheme '" + volume.scheme_id() + "' vs manifest scheme '" +
                                                    manifest.scheme + "'");
    std::vector<bool> seen(65536, false);
    for (auto v : volume.labels())
        seen[v] = true;
    for (int id = 1; id < 65536; ++id)
        if (seen[id] && !manifest.has_label(id))
            throw Error(ErrorCode::label_not_in_scheme,
                        "label " + std::to_string(id) + " is not declared by scheme '" + manifest.scheme + "'");
}

BinaryMask extract_structure_mask(const LabelVolume& volume, const ChallengeManifest& manifest,
                                  std::string_view structure)
{
    if (!volume.scheme_id().empty() && volume.scheme_id() != manifest.scheme)
        throw Error(ErrorCode::scheme_mismatch, "volume scheme '" + volume.scheme_id() + "' vs manifest scheme '" +
                                                    manifest.scheme + "'");
    const StructureSpec& s = manifest.structure(structure);
    std::vector<int> ids;
    if (s.kind == StructureKind::direct) {
        ids = s.labels;
    }
    else if (s.kind == StructureKind::union_of) {
        for (const auto& op : s.operands) {
            const auto& operand = manifest.structure(op);
            ids.insert(ids.end(), operand.labels.begin(), operand.labels.end());
        }
    }
    else {
        throw Error(ErrorCode::invalid_argument,
                    "interface structure '" + s.name + "' has no voxel mask; use interface_points");
    }
    std::vector<bool> select(65536, false);
    for (int id : ids)
        if (id >= 0 && id < 65536)
            select[id] = true;
    std::vector<std::uint8_t> bits(volume.labels().size());
    const auto& labels = volume.labels();
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = select[labels[i]] ? 1 : 0;
    return BinaryMask(volume.grid(), std::move(bits));
}

} // namespace chaleval
