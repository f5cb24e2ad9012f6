#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vastzones/eig.hpp"
#include "vastzones/metrics.hpp"
#include "vastzones/percept.hpp"
#include "vastzones/room.hpp"
#include "vastzones/signal.hpp"
#include "vastzones/vast.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_vastzones, m) {
  m.doc() = "Sound zone control core: VAST filters, room simulation, masking";

  m.def("sine_window", &vz::sine_window, py::arg("n"));

  m.def(
      "convolve",
      [](const std::vector<double>& x, const std::vector<double>& h) {
        return vz::convolve(x, h);
      },
      py::arg("x"), py::arg("h"));

  m.def(
      "segment_signal",
      [](const std::vector<double>& x, std::size_t n_len, std::size_t overlap) {
        vz::Segmenter seg = vz::make_sine_segmenter(n_len, overlap);
        std::vector<vz::Frame> frames = vz::segment(x, seg);
        std::vector<std::pair<std::ptrdiff_t, std::vector<double>>> out;
        out.reserve(frames.size());
        for (vz::Frame& f : frames) out.emplace_back(f.start, std::move(f.data));
        return out;
      },
      py::arg("x"), py::arg("n_len"), py::arg("overlap"));

  m.def(
      "overlap_add",
      [](const std::vector<std::pair<std::ptrdiff_t, std::vector<double>>>& frames,
         std::size_t n_len, std::size_t overlap, std::size_t out_len) {
        std::vector<vz::Frame> fr;
        fr.reserve(frames.size());
        for (const auto& [start, data] : frames) fr.push_back({start, data});
        vz::Segmenter seg = vz::make_sine_segmenter(n_len, overlap);
        return vz::overlap_add(fr, seg, out_len);
      },
      py::arg("frames"), py::arg("n_len"), py::arg("overlap"), py::arg("out_len"));

  py::class_<vz::RoomSpec>(m, "RoomSpec")
      .def(py::init<>())
      .def_readwrite("dimensions", &vz::RoomSpec::dimensions)
      .def_readwrite("bounded", &vz::RoomSpec::bounded)
      .def_readwrite("t60", &vz::RoomSpec::t60)
      .def_readwrite("speed_of_sound", &vz::RoomSpec::speed_of_sound)
      .def_readwrite("sample_rate", &vz::RoomSpec::sample_rate);

  py::class_<vz::SceneGeometry>(m, "SceneGeometry")
      .def(py::init<>())
      .def_readwrite("loudspeakers", &vz::SceneGeometry::loudspeakers)
      .def_readwrite("control_alpha", &vz::SceneGeometry::control_alpha)
      .def_readwrite("control_beta", &vz::SceneGeometry::control_beta)
      .def_readwrite("monitor_alpha", &vz::SceneGeometry::monitor_alpha)
      .def_readwrite("monitor_beta", &vz::SceneGeometry::monitor_beta)
      .def_readwrite("virtual_source", &vz::SceneGeometry::virtual_source);

  py::class_<vz::RIRSet>(m, "RIRSet")
      .def_readonly("m_count", &vz::RIRSet::m_count)
      .def_readonly("l_count", &vz::RIRSet::l_count)
      .def_readonly("k_taps", &vz::RIRSet::k_taps)
      .def_readonly("sample_rate", &vz::RIRSet::sample_rate)
      .def("rir", &vz::RIRSet::rir_vec, py::arg("m"), py::arg("l"))
      .def("virtual_rir", &vz::RIRSet::vrir_vec, py::arg("m"));

  m.def("generate_anechoic_rirs", &vz::generate_anechoic_rirs, py::arg("scene"),
        py::arg("room"), py::arg("k_taps"));
  m.def("generate_image_source_rirs", &vz::generate_image_source_rirs, py::arg("scene"),
        py::arg("room"), py::arg("k_taps"), py::arg("max_order"));

  py::class_<vz::JointDiag>(m, "JointDiag")
      .def_readonly("u", &vz::JointDiag::u)
      .def_readonly("lam", &vz::JointDiag::lambda);

  m.def(
      "joint_diagonalize",
      [](const Eigen::MatrixXd& r_b, const Eigen::MatrixXd& r_d, double reg) {
        return vz::joint_diagonalize(r_b, r_d, reg);
      },
      py::arg("r_b"), py::arg("r_d"), py::arg("regularization") = 0.0);

  m.def(
      "solve_vast",
      [](const vz::JointDiag& jd, const Eigen::VectorXd& r_b, std::size_t v, double mu,
         std::size_t l_count) {
        const std::size_t lj = static_cast<std::size_t>(jd.lambda.size());
        vz::ControlFilterBank bank =
            vz::solve_vast(jd, r_b, {v, mu}, l_count, lj / l_count);
        return std::make_pair(bank.q, bank.coeff_a);
      },
      py::arg("jd"), py::arg("r_b"), py::arg("v"), py::arg("mu"),
      py::arg("l_count") = 1);

  m.def(
      "closed_form_powers",
      [](const vz::JointDiag& jd, const Eigen::VectorXd& r_b, double sigma_d_sq,
         std::size_t v, double mu) {
        vz::ClosedFormPowers p = vz::closed_form_powers(jd, r_b, sigma_d_sq, {v, mu});
        return std::make_tuple(p.s_b, p.s_d, p.lagrangian);
      },
      py::arg("jd"), py::arg("r_b"), py::arg("sigma_d_sq"), py::arg("v"), py::arg("mu"));

  m.def(
      "masking_curve",
      [](const std::vector<double>& windowed_segment, double fs) {
        vz::MaskingCurve c = vz::masking_curve(windowed_segment, fs);
        return c.amplitude;
      },
      py::arg("windowed_segment"), py::arg("sample_rate"));

  m.def(
      "weighting_filter",
      [](const std::vector<double>& amplitude, double fs, std::size_t n_taps) {
        vz::MaskingCurve c;
        c.amplitude = amplitude;
        c.sample_rate = fs;
        c.n_fft = (amplitude.size() - 1) * 2;
        return vz::weighting_filter(c, n_taps).taps;
      },
      py::arg("amplitude"), py::arg("sample_rate"), py::arg("n_taps"));

  m.def("threshold_in_quiet_db_spl", &vz::threshold_in_quiet_db_spl, py::arg("f_hz"));
  m.def("bark_scale", &vz::bark_scale, py::arg("f_hz"));
  m.attr("SPL_ANCHOR_DBFS") = vz::kSplAnchorDbfs;

  py::class_<vz::ObservationWindow>(m, "ObservationWindow")
      .def(py::init([](std::size_t begin, std::size_t end) {
             return vz::ObservationWindow{begin, end};
           }),
           py::arg("begin"), py::arg("end"))
      .def_readwrite("begin", &vz::ObservationWindow::begin)
      .def_readwrite("end", &vz::ObservationWindow::end);

  m.def("acoustic_contrast_db", &vz::acoustic_contrast_db, py::arg("bright"),
        py::arg("dark"), py::arg("window"));
  m.def("nsdp_db", &vz::nsdp_db, py::arg("p"), py::arg("d"), py::arg("window"));
  m.def("tir_db", &vz::tir_db, py::arg("target"), py::arg("interferer"),
        py::arg("window"));
}
