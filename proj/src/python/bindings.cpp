#include "chaleval/cli.hpp"
#include "chaleval/error.hpp"
#include "chaleval/evaluate.hpp"
#include "chaleval/nifti.hpp"
#include "chaleval/ordinal.hpp"
#include "chaleval/ranking.hpp"
#include "chaleval/seg_metrics.hpp"
#include "chaleval/stability.hpp"
#include "chaleval/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace chaleval;

namespace {

// Arrays are indexed [x, y, z] on the Python side.
BinaryMask to_mask(const py::array& array, const std::array<double, 3>& spacing)
{
    auto a = py::array_t<std::uint8_t, py::array::forcecast>(array);
    if (a.ndim() != 3)
        throw py::value_error("mask must be a 3-D array");
    Grid g{{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2))}, spacing};
    g.validate();
    BinaryMask m(g);
    const auto r = a.unchecked<3>();
    for (int x = 0; x < g.dims[0]; ++x)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int z = 0; z < g.dims[2]; ++z)
                m.set(x, y, z, r(x, y, z) != 0);
    return m;
}

py::dict metric_dict(const MetricValue& v)
{
    py::dict d;
    d["metric"] = v.metric;
    d["value"] = v.value;
    d["penalized"] = v.penalized;
    d["both_empty"] = v.both_empty;
    return d;
}

py::dict ranking_dict(const RankingOutcome& r)
{
    py::dict d;
    d["scheme"] = r.scheme;
    d["teams"] = r.teams;
    d["rank_scores"] = r.rank_scores;
    d["final_ranks"] = r.final_ranks;
    return d;
}

ResultsTable table_from(const py::object& results)
{
    if (py::isinstance<py::str>(results) || py::hasattr(results, "__fspath__"))
        return read_results_csv(py::str(results).cast<std::string>());
    std::vector<ResultEntry> rows;
    for (const auto& item : results) {
        const auto d = item.cast<py::dict>();
        ResultEntry e;
        e.case_id = d["case_id"].cast<std::string>();
        e.team = d["team"].cast<std::string>();
        e.structure = d["structure"].cast<std::string>();
        e.metric = d["metric"].cast<std::string>();
        e.value = d["value"].cast<double>();
        e.ranked = d.contains("ranked") ? d["ranked"].cast<bool>() : true;
        rows.push_back(std::move(e));
    }
    return ResultsTable(std::move(rows));
}

} // namespace

PYBIND11_MODULE(_chaleval, m)
{
    m.doc() = "Challenge evaluation: segmentation metrics, rankings and ranking stability";

    py::register_exception<Error>(m, "ChalevalError", PyExc_ValueError);

    m.def(
        "read_label_volume",
        [](const std::filesystem::path& path) {
            const auto v = read_label_volume(path);
            const auto& g = v.grid();
            py::array_t<std::uint16_t> labels({g.dims[0], g.dims[1], g.dims[2]});
            auto w = labels.mutable_unchecked<3>();
            for (int z = 0; z < g.dims[2]; ++z)
                for (int y = 0; y < g.dims[1]; ++y)
                    for (int x = 0; x < g.dims[0]; ++x)
                        w(x, y, z) = v.at(x, y, z);
            return py::make_tuple(labels, g.spacing);
        },
        py::arg("path"), "Returns (labels[x, y, z], spacing).");

    m.def(
        "write_label_volume",
        [](const py::array& array, const std::array<double, 3>& spacing, const std::filesystem::path& path) {
            auto a = py::array_t<std::int64_t, py::array::forcecast>(array);
            if (a.ndim() != 3)
                throw py::value_error("labels must be a 3-D array");
            Grid g{{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2))}, spacing};
            std::vector<LabelVolume::label_type> labels(g.voxel_count());
            const auto r = a.unchecked<3>();
            for (int z = 0; z < g.dims[2]; ++z)
                for (int y = 0; y < g.dims[1]; ++y)
                    for (int x = 0; x < g.dims[0]; ++x) {
                        const auto v = r(x, y, z);
                        if (v < 0 || v > 65535)
                            throw py::value_error("labels must lie in [0, 65535]");
                        labels[g.linear(x, y, z)] = static_cast<LabelVolume::label_type>(v);
                    }
            write_label_volume(LabelVolume(g, std::move(labels)), path);
        },
        py::arg("labels"), py::arg("spacing"), py::arg("path"));

    m.def(
        "dice",
        [](const py::array& pred, const py::array& gt) {
            return metric_dict(dice(to_mask(pred, {1, 1, 1}), to_mask(gt, {1, 1, 1})));
        },
        py::arg("pred"), py::arg("gt"));

    m.def(
        "assd",
        [](const py::array& pred, const py::array& gt, const std::array<double, 3>& spacing, double penalty_mm) {
            return metric_dict(assd(to_mask(pred, spacing), to_mask(gt, spacing), penalty_mm));
        },
        py::arg("pred"), py::arg("gt"), py::arg("spacing") = std::array<double, 3>{1, 1, 1},
        py::arg("penalty_mm") = 350.0);

    m.def(
        "ma_mae",
        [](const std::vector<int>& truth, const std::vector<int>& predicted, bool fixed_class_count) {
            if (truth.size() != predicted.size())
                throw py::value_error("truth and predicted differ in length");
            std::vector<OrdinalItem> items;
            for (std::size_t i = 0; i < truth.size(); ++i)
                items.push_back({std::to_string(i), truth[i], predicted[i]});
            return ma_mae(OrdinalPredictionSet(std::move(items)), fixed_class_count);
        },
        py::arg("truth"), py::arg("predicted"), py::arg("fixed_class_count") = false);

    m.def(
        "kendall_tau",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return kendall_tau(std::span<const double>(a), std::span<const double>(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "rank_teams",
        [](const py::object& results, const std::string& scheme, const std::vector<std::string>& metrics) {
            return ranking_dict(rank_teams(table_from(results), parse_scheme(scheme), RankOptions{metrics}));
        },
        py::arg("results"), py::arg("scheme") = "official", py::arg("metrics") = std::vector<std::string>{},
        "results: a results CSV path or a list of dicts with case_id, team, structure, metric, value.");

    m.def(
        "bootstrap_stability",
        [](const py::object& results, const std::string& scheme, std::size_t n_samples, std::uint64_t seed) {
            BootstrapOptions o;
            o.n_samples = n_samples;
            o.seed = seed;
            const auto s = bootstrap_stability(table_from(results), parse_scheme(scheme), o);
            py::dict d;
            d["teams"] = s.teams;
            d["reference_ranks"] = s.reference_ranks;
            d["taus"] = s.taus;
            d["tau_median"] = s.tau_median;
            d["tau_iqr"] = py::make_tuple(s.tau_q1, s.tau_q3);
            d["distinct_fraction_mean"] = s.distinct_fraction_mean;
            return d;
        },
        py::arg("results"), py::arg("scheme") = "official", py::arg("n_samples") = 1000, py::arg("seed") = 0);

    m.def(
        "generate_challenge",
        [](const std::filesystem::path& out_dir, std::size_t n_cases, std::size_t n_teams, std::uint64_t seed,
           const std::string& op) {
            generate_challenge(graded_synth_spec(n_cases, n_teams, seed, parse_perturb_kind(op)), out_dir);
            return (out_dir / "manifest.json").string();
        },
        py::arg("out_dir"), py::arg("n_cases") = 20, py::arg("n_teams") = 3, py::arg("seed") = 0,
        py::arg("op") = "dilate", "Writes a graded synthetic challenge; returns the manifest path.");

    m.def(
        "evaluate_challenge",
        [](const std::filesystem::path& manifest_path) {
            py::list rows;
            for (const auto& e : evaluate_challenge(load_manifest(manifest_path))) {
                py::dict d;
                d["case_id"] = e.case_id;
                d["team"] = e.team;
                d["structure"] = e.structure;
                d["metric"] = e.metric;
                d["value"] = e.value;
                d["ranked"] = e.ranked;
                d["penalized"] = e.penalized;
                d["both_empty"] = e.both_empty;
                rows.append(std::move(d));
            }
            return rows;
        },
        py::arg("manifest"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a command line; returns (exit_code, stdout, stderr).");
}
