#include "chaleval/ordinal.hpp"

#include "chaleval/csv.hpp"
#include "chaleval/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace chaleval {

namespace {

std::size_t grade_index(const std::vector<int>& domain, int grade)
{
    const auto it = std::find(domain.begin(), domain.end(), grade);
    return static_cast<std::size_t>(it - domain.begin());
}

} // namespace

OrdinalPredictionSet::OrdinalPredictionSet(std::vector<OrdinalItem> items, std::vector<int> grade_domain)
    : items_(std::move(items)), domain_(std::move(grade_domain))
{
    if (domain_.empty())
        throw Error(ErrorCode::invalid_argument, "empty grade domain");
    if (!std::is_sorted(domain_.begin(), domain_.end()) ||
        std::adjacent_find(domain_.begin(), domain_.end()) != domain_.end())
        throw Error(ErrorCode::invalid_argument, "grade domain must be strictly increasing");
    std::set<std::string> ids;
    for (const auto& it : items_) {
        if (!ids.insert(it.case_id).second)
            throw Error(ErrorCode::invalid_argument, "duplicate case id '" + it.case_id + "'");
        for (int g : {it.truth, it.predicted})
            if (!std::binary_search(domain_.begin(), domain_.end(), g))
                throw Error(ErrorCode::invalid_argument,
                            "grade " + std::to_string(g) + " of case '" + it.case_id + "' outside the grade domain");
    }
}

double ma_mae(const OrdinalPredictionSet& preds, bool fixed_class_count)
{
    if (preds.items().empty())
        throw Error(ErrorCode::invalid_argument, "MA-MAE of an empty prediction set");
    const auto& domain = preds.grade_domain();
    std::vector<double> error_sum(domain.size(), 0.0);
    std::vector<std::size_t> count(domain.size(), 0);
    for (const auto& it : preds.items()) {
        const auto c = grade_index(domain, it.truth);
        error_sum[c] += std::abs(it.truth - it.predicted);
        ++count[c];
    }
    double total = 0.0;
    std::size_t classes = 0;
    for (std::size_t c = 0; c < domain.size(); ++c) {
        if (count[c] == 0)
            continue;
        total += error_sum[c] / static_cast<double>(count[c]);
        ++classes;
    }
    const auto divisor = fixed_class_count ? domain.size() : classes;
    return total / static_cast<double>(divisor);
}

std::vector<std::vector<double>> confusion_matrix(const OrdinalPredictionSet& preds, bool normalized)
{
    const auto& domain = preds.grade_domain();
    std::vector<std::vector<double>> m(domain.size(), std::vector<double>(domain.size(), 0.0));
    for (const auto& it : preds.items())
        m[grade_index(domain, it.truth)][grade_index(domain, it.predicted)] += 1.0;
    if (normalized) {
        for (auto& row : m) {
            double n = 0.0;
            for (double v : row)
                n += v;
            if (n > 0.0)
                for (double& v : row)
                    v /= n;
        }
    }
    return m;
}

std::vector<std::pair<std::string, int>> read_grade_csv(const std::filesystem::path& path)
{
    const auto rows = read_csv(path);
    std::vector<std::pair<std::string, int>> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < 2)
            throw Error(ErrorCode::invalid_argument, path.string() + ": row " + std::to_string(r + 1) + " needs two columns");
        const auto grade = parse_int(row[1]);
        if (!grade) {
            if (r == 0)
                continue; // header
            throw Error(ErrorCode::invalid_argument, path.string() + ": bad grade '" + row[1] + "'");
        }
        out.emplace_back(row[0], *grade);
    }
    return out;
}

OrdinalPredictionSet join_grades(const std::vector<std::pair<std::string, int>>& truth,
                                 const std::vector<std::pair<std::string, int>>& predicted,
                                 std::vector<int> grade_domain)
{
    std::map<std::string, int> pred;
    for (const auto& [id, g] : predicted)
        if (!pred.emplace(id, g).second)
            throw Error(ErrorCode::invalid_argument, "duplicate prediction for case '" + id + "'");
    std::vector<OrdinalItem> items;
    for (const auto& [id, g] : truth) {
        const auto it = pred.find(id);
        if (it == pred.end())
            throw Error(ErrorCode::incomplete_table, "no prediction for case '" + id + "'");
        items.push_back({id, g, it->second});
        pred.erase(it);
    }
    if (!pred.empty())
        throw Error(ErrorCode::invalid_argument, "prediction for unknown case '" + pred.begin()->first + "'");
    return OrdinalPredictionSet(std::move(items), std::move(grade_domain));
}

} // namespace chaleval
