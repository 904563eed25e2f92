#include "projstruct/structure.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "projstruct/errors.hpp"

namespace projstruct {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<int> int_array(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw ContractError(std::string("structure JSON: missing array '") + field + "'");
    std::vector<int> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number_integer())
            throw ContractError(std::string("structure JSON: non-integer in '") + field + "'");
        out.push_back(v.get<int>());
    }
    return out;
}

std::vector<std::vector<int>> nested_array(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw ContractError(std::string("structure JSON: missing array '") + field + "'");
    std::vector<std::vector<int>> out;
    for (const auto& row : j.at(field)) {
        nlohmann::json wrapper = {{"x", row}};
        out.push_back(int_array(wrapper, "x"));
    }
    return out;
}

int int_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number_integer())
        throw ContractError(std::string("structure JSON: missing integer '") + field + "'");
    return j.at(field).get<int>();
}

void join(std::ostringstream& os, const std::vector<int>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
}

}  // namespace

std::string structure_tag(const Structure& s) {
    return std::visit(overloaded{
                          [](const Truncation&) { return std::string("truncation"); },
                          [](const SparseSet&) { return std::string("sparse"); },
                          [](const LeveledSparse&) { return std::string("leveled"); },
                          [](const MultiLevelPartition&) { return std::string("clustering"); },
                          [](const JumpSet&) { return std::string("jump"); },
                          [](const KnotSet&) { return std::string("knot"); },
                          [](const RegressionSupport&) { return std::string("regression"); },
                          [](const Band&) { return std::string("band"); },
                          [](const Bicluster&) { return std::string("bicluster"); },
                      },
                      s);
}

nlohmann::json to_json(const Structure& s) {
    nlohmann::json data = std::visit(
        overloaded{
            [](const Truncation& t) { return nlohmann::json{{"level", t.level}}; },
            [](const SparseSet& t) { return nlohmann::json{{"indices", t.indices}}; },
            [](const LeveledSparse& t) { return nlohmann::json{{"levels", t.levels}}; },
            [](const MultiLevelPartition& t) {
                return nlohmann::json{{"clusters", t.clusters}, {"free", t.free}};
            },
            [](const JumpSet& t) { return nlohmann::json{{"breaks", t.breaks}}; },
            [](const KnotSet& t) { return nlohmann::json{{"knots", t.knots}}; },
            [](const RegressionSupport& t) {
                return nlohmann::json{{"full_rank", t.full_rank}, {"indices", t.indices}};
            },
            [](const Band& t) { return nlohmann::json{{"width", t.width}}; },
            [](const Bicluster& t) { return nlohmann::json{{"cols", t.cols}, {"rows", t.rows}}; },
        },
        s);
    return nlohmann::json{{"data", std::move(data)}, {"family", structure_tag(s)}};
}

Structure structure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.contains("data"))
        throw ContractError("structure JSON: expected {\"family\", \"data\"}");
    const auto tag = j.at("family").get<std::string>();
    const auto& d = j.at("data");
    if (tag == "truncation") return Truncation{int_field(d, "level")};
    if (tag == "sparse") return SparseSet{int_array(d, "indices")};
    if (tag == "leveled") return LeveledSparse{nested_array(d, "levels")};
    if (tag == "clustering")
        return MultiLevelPartition{int_array(d, "free"), nested_array(d, "clusters")};
    if (tag == "jump") return JumpSet{int_array(d, "breaks")};
    if (tag == "knot") return KnotSet{int_array(d, "knots")};
    if (tag == "regression") {
        if (!d.contains("full_rank") || !d.at("full_rank").is_boolean())
            throw ContractError("structure JSON: missing boolean 'full_rank'");
        return RegressionSupport{int_array(d, "indices"), d.at("full_rank").get<bool>()};
    }
    if (tag == "band") return Band{int_field(d, "width")};
    if (tag == "bicluster") return Bicluster{int_array(d, "rows"), int_array(d, "cols")};
    throw ContractError("structure JSON: unknown family '" + tag + "'");
}

std::string to_string(const Structure& s) {
    std::ostringstream os;
    os << structure_tag(s) << '{';
    std::visit(overloaded{
                   [&](const Truncation& t) { os << t.level; },
                   [&](const SparseSet& t) { join(os, t.indices); },
                   [&](const LeveledSparse& t) {
                       for (std::size_t j = 0; j < t.levels.size(); ++j) {
                           os << (j ? "|" : "");
                           join(os, t.levels[j]);
                       }
                   },
                   [&](const MultiLevelPartition& t) {
                       os << "free:";
                       join(os, t.free);
                       for (const auto& c : t.clusters) {
                           os << " (";
                           join(os, c);
                           os << ')';
                       }
                   },
                   [&](const JumpSet& t) { join(os, t.breaks); },
                   [&](const KnotSet& t) { join(os, t.knots); },
                   [&](const RegressionSupport& t) {
                       if (t.full_rank) os << "I_r:";
                       join(os, t.indices);
                   },
                   [&](const Band& t) { os << t.width; },
                   [&](const Bicluster& t) {
                       join(os, t.rows);
                       os << " x ";
                       join(os, t.cols);
                   },
               },
               s);
    os << '}';
    return os.str();
}

std::vector<int> canonical_labels(const std::vector<int>& labels) {
    std::unordered_map<int, int> remap;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
        out.push_back(it->second);
    }
    return out;
}

}  // namespace projstruct
