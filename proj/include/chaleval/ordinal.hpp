#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chaleval {

struct OrdinalItem {
    std::string case_id;
    int truth = 0;
    int predicted = 0;
};

/// Graded predictions over an ordered grade domain (Koos grades 1..4 by default).
class OrdinalPredictionSet {
public:
    OrdinalPredictionSet(std::vector<OrdinalItem> items, std::vector<int> grade_domain = {1, 2, 3, 4});

    const std::vector<OrdinalItem>& items() const noexcept { return items_; }
    const std::vector<int>& grade_domain() const noexcept { return domain_; }

private:
    std::vector<OrdinalItem> items_;
    std::vector<int> domain_;
};

/// Macro-averaged mean absolute error: per-grade mean |truth - predicted| over
/// the items whose true grade is c, averaged over grades. By default only
/// grades with at least one true sample count towards the average; with
/// fixed_class_count the divisor is the size of the grade domain instead.
double ma_mae(const OrdinalPredictionSet& preds, bool fixed_class_count = false);

/// Rows are true grades, columns predicted grades, both in domain order.
/// Normalized rows sum to 1 (rows without samples stay zero).
std::vector<std::vector<double>> confusion_matrix(const OrdinalPredictionSet& preds, bool normalized);

/// Two-column CSV (case_id, grade); an optional non-numeric header row is skipped.
std::vector<std::pair<std::string, int>> read_grade_csv(const std::filesystem::path& path);

/// Joins truth and prediction files by case id. Missing or extra predictions are errors.
OrdinalPredictionSet join_grades(const std::vector<std::pair<std::string, int>>& truth,
                                 const std::vector<std::pair<std::string, int>>& predicted,
                                 std::vector<int> grade_domain = {1, 2, 3, 4});

} // namespace chaleval
