#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pfedeg/aggregation.hpp"
#include "pfedeg/checkpoint.hpp"
#include "pfedeg/cli.hpp"
#include "pfedeg/dataset_io.hpp"
#include "pfedeg/errors.hpp"
#include "pfedeg/federation.hpp"

namespace py = pybind11;
using namespace pfedeg;

namespace {

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw InvalidInputError("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + m.size(), m.data());
    return m;
}

py::array_t<double> array_from_matrix(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), a.mutable_data());
    return a;
}

std::vector<double> vec_from_array(const py::array_t<double>& a) {
    if (a.ndim() != 1) throw InvalidInputError("expected a 1-D array");
    std::vector<double> v(a.shape(0));
    std::copy(a.data(), a.data() + v.size(), v.begin());
    return v;
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["mrr"] = r.mrr;
    d["hits1"] = r.hits1;
    d["hits5"] = r.hits5;
    d["hits10"] = r.hits10;
    d["count"] = r.triple_count;
    return d;
}

TrainingConfig config_from_kwargs(const py::kwargs& kwargs) {
    TrainingConfig cfg;
    for (const auto& item : kwargs) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "mode") cfg.mode = mode_from_name(py::cast<std::string>(item.second));
        else if (key == "ablation")
            cfg.ablation = ablation_from_name(py::cast<std::string>(item.second));
        else if (key == "scorer") cfg.scorer = scorer_from_name(py::cast<std::string>(item.second));
        else if (key == "strategy")
            cfg.strategy = strategy_from_name(py::cast<std::string>(item.second));
        else if (key == "fraction") cfg.fraction = py::cast<double>(item.second);
        else if (key == "epochs") cfg.epochs = py::cast<int>(item.second);
        else if (key == "batch_size") cfg.batch_size = py::cast<int>(item.second);
        else if (key == "learning_rate") cfg.learning_rate = py::cast<double>(item.second);
        else if (key == "beta") cfg.beta = py::cast<double>(item.second);
        else if (key == "p") cfg.p = py::cast<double>(item.second);
        else if (key == "gamma") cfg.gamma = py::cast<double>(item.second);
        else if (key == "alpha") cfg.alpha = py::cast<double>(item.second);
        else if (key == "negatives") cfg.negatives = py::cast<int>(item.second);
        else if (key == "dim") cfg.dim = py::cast<int>(item.second);
        else if (key == "rounds") cfg.max_rounds = py::cast<int>(item.second);
        else if (key == "eval_every") cfg.eval_every = py::cast<int>(item.second);
        else if (key == "patience") cfg.patience = py::cast<int>(item.second);
        else if (key == "seed") cfg.seed = py::cast<std::uint64_t>(item.second);
        else if (key == "raw") cfg.filtered_eval = !py::cast<bool>(item.second);
        else if (key == "threads") cfg.threads = py::cast<int>(item.second);
        else throw ConfigError("unknown train() keyword: " + key);
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_pfedeg, m) {
    m.doc() = "federated knowledge graph embedding: simulator core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<LoadError>(m, "LoadError", PyExc_IOError);
    py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);

    py::class_<FederatedDataset>(m, "Dataset")
        .def_property_readonly("client_count", &FederatedDataset::client_count)
        .def_property_readonly("global_entity_count",
                               [](const FederatedDataset& d) {
                                   return d.registry.global_entity_count();
                               })
        .def("entity_count",
             [](const FederatedDataset& d, int c) { return d.clients.at(c).entity_count(); })
        .def("relation_count",
             [](const FederatedDataset& d, int c) { return d.clients.at(c).relation_count(); })
        .def("triple_count",
             [](const FederatedDataset& d, int c, const std::string& split) {
                 return d.clients.at(c).indexed(split).size();
             })
        .def("shared_count",
             [](const FederatedDataset& d, int i, int j) { return d.registry.shared_count(i, j); })
        .def("existence_matrix",
             [](const FederatedDataset& d) { return array_from_matrix(d.registry.existence_matrix()); });

    py::class_<RunResult>(m, "RunResult")
        .def_property_readonly("checkpoint_round",
                               [](const RunResult& r) { return r.checkpoint_round; })
        .def_property_readonly("rounds_run", [](const RunResult& r) { return r.rounds_run; })
        .def_property_readonly("early_stopped", [](const RunResult& r) { return r.early_stopped; })
        .def_property_readonly("checkpoint_mrr",
                               [](const RunResult& r) -> py::object {
                                   if (!r.checkpoint_mrr) return py::none();
                                   return py::float_(*r.checkpoint_mrr);
                               })
        .def("entities",
             [](const RunResult& r, int c) { return array_from_matrix(r.stores.at(c).entities); })
        .def("relations",
             [](const RunResult& r, int c) { return array_from_matrix(r.stores.at(c).relations); })
        .def("validation_curve", [](const RunResult& r) {
            std::vector<std::pair<int, double>> curve;
            for (const RoundRecord& record : r.rounds)
                if (record.weighted_mrr) curve.emplace_back(record.round, *record.weighted_mrr);
            return curve;
        });

    m.def(
        "generate_synthetic",
        [](int clients, int entities, int relations, int triples, double overlap,
           double heterogeneity, std::uint64_t seed) {
            SynthSpec spec;
            spec.clients = clients;
            spec.entities_per_client = entities;
            spec.relations_per_client = relations;
            spec.triples_per_client = triples;
            spec.overlap = overlap;
            spec.heterogeneity = heterogeneity;
            return generate_synthetic(spec, seed);
        },
        py::arg("clients") = 3, py::arg("entities") = 500, py::arg("relations") = 10,
        py::arg("triples") = 3000, py::arg("overlap") = 0.4, py::arg("heterogeneity") = 0.4,
        py::arg("seed") = 1);

    m.def("load_dataset", [](const std::string& path) { return load_dataset(path); },
          py::arg("path"));
    m.def("save_dataset",
          [](const FederatedDataset& d, const std::string& path) { save_dataset(d, path); },
          py::arg("dataset"), py::arg("path"));

    m.def(
        "train",
        [](const FederatedDataset& dataset, const py::kwargs& kwargs) {
            const TrainingConfig cfg = config_from_kwargs(kwargs);
            py::gil_scoped_release release;
            return run(dataset, cfg);
        },
        py::arg("dataset"), "Run federated training; keyword arguments mirror the CLI flags.");

    m.def(
        "evaluate",
        [](const RunResult& result, const FederatedDataset& dataset, const std::string& split,
           bool raw) {
            const EvalOptions options{.filtered = !raw};
            std::vector<MetricReport> reports;
            if (result.merged) {
                FederatedDataset merged;
                merged.clients.push_back(*result.merged);
                reports = evaluate_all(result.stores, merged, split, options, 0);
            } else {
                reports = evaluate_all(result.stores, dataset, split, options, 0);
            }
            py::list per_client;
            std::vector<double> values;
            std::vector<std::size_t> counts;
            for (const MetricReport& r : reports) {
                per_client.append(report_dict(r));
                values.push_back(r.mrr);
                counts.push_back(r.triple_count);
            }
            py::dict out;
            out["clients"] = per_client;
            out["weighted_mrr"] = weighted_mrr(values, counts);
            return out;
        },
        py::arg("result"), py::arg("dataset"), py::arg("split") = "test", py::arg("raw") = false);

    m.def(
        "score",
        [](const std::string& scorer, const py::array_t<double>& h, const py::array_t<double>& r,
           const py::array_t<double>& t) {
            const auto hv = vec_from_array(h);
            const auto rv = vec_from_array(r);
            const auto tv = vec_from_array(t);
            return score_vectors(scorer_from_name(scorer), hv, rv, tv);
        },
        py::arg("scorer"), py::arg("head"), py::arg("relation"), py::arg("tail"));

    m.def("metrics", [](const std::vector<std::size_t>& ranks) {
        return report_dict(metrics(ranks));
    });

    m.def("weights_ratio",
          [](const FederatedDataset& d) { return array_from_matrix(weights_ratio(d.registry)); });
    m.def("weights_uniform",
          [](std::size_t c) { return array_from_matrix(weights_uniform(c)); });
    m.def("scale_rows", [](const py::array_t<double>& raw) {
        return array_from_matrix(scale_rows(matrix_from_array(raw)));
    });
    m.def(
        "aggregate",
        [](const py::array_t<double>& W, const py::array_t<double>& G,
           const py::array_t<double>& M, std::size_t m_dim) {
            return array_from_matrix(
                aggregate(matrix_from_array(W), matrix_from_array(G), matrix_from_array(M), m_dim));
        },
        py::arg("W"), py::arg("G"), py::arg("M"), py::arg("m"));
    m.def(
        "residual_combine",
        [](const py::array_t<double>& K, const py::array_t<double>& G, double p) {
            return array_from_matrix(
                residual_combine(matrix_from_array(K), matrix_from_array(G), p));
        },
        py::arg("K"), py::arg("G"), py::arg("p"));

    m.def("cli", &cli_main, py::arg("args"),
          "Invoke the command-line interface in-process; returns the exit code.");
}
