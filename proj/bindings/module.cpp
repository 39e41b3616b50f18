// Python bindings for the speckle ESN core.

#include "sesn/common.hpp"
#include "sesn/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace sesn;

#ifndef SESN_VERSION
#define SESN_VERSION "0.0.0-dev"
#endif

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Binary echo-state network on a simulated light-scattering medium";
    m.attr("__version__") = SESN_VERSION;

    m.def("set_num_threads", &set_num_threads, py::arg("n"),
          "Worker threads for the optics kernels (0 = auto); results are identical for every value");
    m.def("num_threads", &num_threads);
    m.def("set_memory_budget_bytes", &set_memory_budget_bytes, py::arg("bytes"));
    m.def("memory_budget_bytes", &memory_budget_bytes);

    // timeseries
    py::class_<MgParams>(m, "MgParams")
        .def(py::init<>())
        .def_readwrite("beta", &MgParams::beta)
        .def_readwrite("gamma", &MgParams::gamma)
        .def_readwrite("tau", &MgParams::tau)
        .def_readwrite("n_exp", &MgParams::n_exp)
        .def_readwrite("h", &MgParams::h)
        .def_readwrite("init_value", &MgParams::init_value)
        .def_readwrite("transient_steps", &MgParams::transient_steps);
    py::class_<MgSeries>(m, "MgSeries")
        .def_readonly("values", &MgSeries::values)
        .def_readonly("params", &MgSeries::params);
    py::class_<SupervisedSeries>(m, "SupervisedSeries")
        .def_readonly("inputs", &SupervisedSeries::inputs)
        .def_readonly("targets", &SupervisedSeries::targets);
    m.def("generate_mackey_glass", &generate_mackey_glass, py::arg("params"), py::arg("length"));
    m.def("make_supervised", &make_supervised, py::arg("series"));

    // encoding
    py::class_<ThermometerEncoder>(m, "ThermometerEncoder")
        .def(py::init<>())
        .def_readwrite("width", &ThermometerEncoder::width)
        .def_readwrite("lo", &ThermometerEncoder::lo)
        .def_readwrite("hi", &ThermometerEncoder::hi);
    py::class_<DmdFrame>(m, "DmdFrame")
        .def_readonly("bits", &DmdFrame::bits)
        .def_readonly("input_width", &DmdFrame::input_width)
        .def_readonly("state_width", &DmdFrame::state_width)
        .def("__len__", &DmdFrame::size);
    m.def(
        "calibrate",
        [](std::size_t width, const std::vector<double>& samples) { return calibrate(width, samples); },
        py::arg("width"), py::arg("samples"));
    m.def("encode", &encode, py::arg("encoder"), py::arg("u"));
    m.def("assemble_frame", &assemble_frame, py::arg("encoded_input"), py::arg("state"));

    // optics
    py::class_<TransferMatrix>(m, "TransferMatrix")
        .def_readonly("entries", &TransferMatrix::entries)
        .def_readonly("seed", &TransferMatrix::seed)
        .def_property_readonly("rows", &TransferMatrix::rows)
        .def_property_readonly("cols", &TransferMatrix::cols);
    py::class_<SpeckleFrame>(m, "SpeckleFrame")
        .def_readonly("intensities", &SpeckleFrame::intensities)
        .def_readonly("quantized", &SpeckleFrame::quantized);
    py::class_<CameraModel>(m, "CameraModel")
        .def(py::init<>())
        .def_readwrite("gain", &CameraModel::gain)
        .def_readwrite("saturation_dn", &CameraModel::saturation_dn)
        .def_readwrite("target_mean_dn", &CameraModel::target_mean_dn);
    py::enum_<ThresholdConfig::Mode>(m, "ThresholdMode")
        .value("fixed_dn", ThresholdConfig::Mode::fixed_dn)
        .value("quantile", ThresholdConfig::Mode::quantile);
    py::class_<ThresholdConfig>(m, "ThresholdConfig")
        .def(py::init<>())
        .def_readwrite("mode", &ThresholdConfig::mode)
        .def_readwrite("fixed_dn", &ThresholdConfig::fixed_dn)
        .def_readwrite("quantile", &ThresholdConfig::quantile);
    m.def("build_transfer_matrix", &build_transfer_matrix, py::arg("n"), py::arg("m"), py::arg("seed"));
    m.def("compute_speckle", &compute_speckle, py::arg("tm"), py::arg("frame"));
    m.def(
        "compute_speckle_batch",
        [](const TransferMatrix& tm, const std::vector<DmdFrame>& frames) {
            return compute_speckle_batch(tm, frames);
        },
        py::arg("tm"), py::arg("frames"));
    m.def("quantize", &quantize, py::arg("camera"), py::arg("frame"));
    m.def(
        "calibrate_gain",
        [](const CameraModel& tmpl, const std::vector<SpeckleFrame>& calibration) {
            return calibrate_gain(tmpl, calibration);
        },
        py::arg("camera_template"), py::arg("calibration"));
    m.def("activate", &activate, py::arg("config"), py::arg("frame"));

    // reservoir
    py::class_<ReservoirConfig>(m, "ReservoirConfig")
        .def(py::init<>())
        .def_readwrite("n_neurons", &ReservoirConfig::n_neurons)
        .def_readwrite("input_width", &ReservoirConfig::input_width)
        .def_readwrite("washout", &ReservoirConfig::washout)
        .def_readwrite("seed", &ReservoirConfig::seed)
        .def_readwrite("threshold", &ReservoirConfig::threshold)
        .def_readwrite("camera", &ReservoirConfig::camera)
        .def_readwrite("batch_size", &ReservoirConfig::batch_size);
    py::class_<ReservoirState>(m, "ReservoirState")
        .def_readonly("bits", &ReservoirState::bits)
        .def_readonly("step", &ReservoirState::step);
    py::class_<StateHistory>(m, "StateHistory")
        .def_readonly("features", &StateHistory::features)
        .def_readonly("targets", &StateHistory::targets)
        .def_readonly("activation_fractions", &StateHistory::activation_fractions)
        .def_readonly("state_width", &StateHistory::state_width)
        .def_readonly("n_instances", &StateHistory::n_instances);
    m.def("instance_seed", &instance_seed, py::arg("base"), py::arg("index"));
    m.def("init_state", &init_state, py::arg("config"));
    m.def("step", &step, py::arg("config"), py::arg("tm"), py::arg("encoder"), py::arg("state"), py::arg("input"));
    m.def(
        "run",
        [](const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& enc,
           const std::vector<double>& inputs, const std::vector<double>& targets) {
            return run(cfg, tm, enc, inputs, targets);
        },
        py::arg("config"), py::arg("tm"), py::arg("encoder"), py::arg("inputs"), py::arg("targets"));
    m.def(
        "run_parallel",
        [](const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& enc,
           const std::vector<double>& inputs, const std::vector<double>& targets, std::size_t n_instances) {
            return run_parallel(cfg, tm, enc, inputs, targets, n_instances);
        },
        py::arg("config"), py::arg("tm"), py::arg("encoder"), py::arg("inputs"), py::arg("targets"),
        py::arg("n_instances"));

    // readout
    py::class_<RidgeConfig>(m, "RidgeConfig")
        .def(py::init<>())
        .def_readwrite("alpha", &RidgeConfig::alpha);
    py::class_<ReadoutModel>(m, "ReadoutModel")
        .def_readonly("weights", &ReadoutModel::weights)
        .def_readonly("alpha", &ReadoutModel::alpha)
        .def_readonly("feature_width", &ReadoutModel::feature_width);
    m.def("fit", &fit, py::arg("config"), py::arg("history"));
    m.def("predict", &predict, py::arg("model"), py::arg("history"));
    m.def("score", &score, py::arg("predictions"), py::arg("targets"));

    // harness
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("mg", &ExperimentConfig::mg)
        .def_readwrite("encoder_width", &ExperimentConfig::encoder_width)
        .def_readwrite("reservoir", &ExperimentConfig::reservoir)
        .def_readwrite("ridge", &ExperimentConfig::ridge)
        .def_readwrite("train_steps", &ExperimentConfig::train_steps)
        .def_readwrite("test_steps", &ExperimentConfig::test_steps)
        .def_readwrite("n_instances", &ExperimentConfig::n_instances)
        .def_readwrite("out_dir", &ExperimentConfig::out_dir)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed);
    py::class_<RunReport>(m, "RunReport")
        .def_readonly("config", &RunReport::config)
        .def_readonly("run_id", &RunReport::run_id)
        .def_readonly("version", &RunReport::version)
        .def_readonly("timestamp", &RunReport::timestamp)
        .def_readonly("encoder", &RunReport::encoder)
        .def_readonly("camera", &RunReport::camera)
        .def_readonly("readout", &RunReport::readout)
        .def_readonly("init_time_s", &RunReport::init_time_s)
        .def_readonly("iter_time_s_per_1000", &RunReport::iter_time_s_per_1000)
        .def_readonly("train_score", &RunReport::train_score)
        .def_readonly("test_score", &RunReport::test_score)
        .def_readonly("activation_mean", &RunReport::activation_mean)
        .def_readonly("activation_min", &RunReport::activation_min)
        .def_readonly("activation_max", &RunReport::activation_max)
        .def_readonly("report_path", &RunReport::report_path)
        .def_readonly("predictions_path", &RunReport::predictions_path);
    py::class_<SweepEntry>(m, "SweepEntry")
        .def_readonly("size", &SweepEntry::size)
        .def_readonly("seed", &SweepEntry::seed)
        .def_readonly("error", &SweepEntry::error)
        .def_readonly("report", &SweepEntry::report)
        .def("ok", &SweepEntry::ok);
    py::class_<ThroughputRecord>(m, "ThroughputRecord")
        .def_readonly("n_neurons", &ThroughputRecord::n_neurons)
        .def_readonly("n_steps", &ThroughputRecord::n_steps)
        .def_readonly("init_time_s", &ThroughputRecord::init_time_s)
        .def_readonly("iter_time_s_per_1000", &ThroughputRecord::iter_time_s_per_1000);
    m.def("parse_config_json", &parse_config_json, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_size_sweep",
        [](const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes, std::size_t seeds_per_size) {
            py::gil_scoped_release release;
            return run_size_sweep(cfg, sizes, seeds_per_size);
        },
        py::arg("config"), py::arg("sizes"), py::arg("seeds_per_size"));
    m.def("bench_throughput", &bench_throughput, py::arg("config"), py::arg("n_steps"),
          py::call_guard<py::gil_scoped_release>());
    m.def("write_series_csv", &write_series_csv, py::arg("series"), py::arg("path"));
}
