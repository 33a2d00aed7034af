#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "gemtomo/calibration.hpp"
#include "gemtomo/config.hpp"
#include "gemtomo/error.hpp"
#include "gemtomo/gemt.hpp"
#include "gemtomo/pipeline.hpp"
#include "gemtomo/scenarios.hpp"

namespace py = pybind11;
using namespace gemtomo;

namespace {

using CArray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;
using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CArray to_numpy(const std::vector<cdouble>& v, std::array<std::size_t, 3> shape) {
    CArray out({shape[0], shape[1], shape[2]});
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(cdouble));
    return out;
}

std::vector<cdouble> from_numpy(const CArray& a, std::array<std::size_t, 3> shape) {
    if (a.ndim() != 3 || std::size_t(a.shape(0)) != shape[0] || std::size_t(a.shape(1)) != shape[1] ||
        std::size_t(a.shape(2)) != shape[2])
        throw ValidationError("array shape does not match (" + std::to_string(shape[0]) + ", " +
                              std::to_string(shape[1]) + ", " + std::to_string(shape[2]) + ")");
    return {a.data(), a.data() + a.size()};
}

py::dict fidelity_dict(const Fidelity& f) {
    py::dict d;
    d["phase_rmse_rad"] = f.phase_rmse;
    d["magnitude_rel_rmse"] = f.magnitude_rel_rmse;
    d["mask_count"] = f.mask_count;
    return d;
}

py::dict decay_dict(const DecayFitResult& r) {
    py::dict d;
    d["mode"] = to_string(r.mode);
    d["tau_k_s"] = r.tau_k;
    d["tau_k_err_s"] = r.tau_k_err;
    d["tau_beta_s"] = r.tau_beta;
    d["tau_beta_err_s"] = r.tau_beta_err;
    d["temperature_k"] = r.temperature;
    d["temperature_err_k"] = r.temperature_err;
    d["amplitude"] = r.amplitude;
    d["residual_rms_log"] = r.residual_rms;
    return d;
}

} // namespace

PYBIND11_MODULE(_gemtomo, m) {
    m.doc() = "Gradient echo memory tomography: forward model, detection and reconstruction";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<AxisSpec>(m, "AxisSpec")
        .def(py::init([](std::size_t n, double step, double origin) { return AxisSpec{n, step, origin}; }),
             py::arg("n"), py::arg("step"), py::arg("origin") = 0.0)
        .def_static("centered", &AxisSpec::centered, py::arg("n"), py::arg("step"), py::arg("center") = 0.0)
        .def_readwrite("n", &AxisSpec::n)
        .def_readwrite("step", &AxisSpec::step)
        .def_readwrite("origin", &AxisSpec::origin)
        .def("coord", &AxisSpec::coord)
        .def("conjugate", &AxisSpec::conjugate)
        .def("coords",
             [](const AxisSpec& a) {
                 DArray out(a.n);
                 for (std::size_t i = 0; i < a.n; ++i) out.mutable_data()[i] = a.coord(i);
                 return out;
             })
        .def("__repr__", [](const AxisSpec& a) {
            return "AxisSpec(n=" + std::to_string(a.n) + ", step=" + py::repr(py::float_(a.step)).cast<std::string>() +
                   ", origin=" + py::repr(py::float_(a.origin)).cast<std::string>() + ")";
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](const AxisSpec& x, const AxisSpec& y, const AxisSpec& z) { return GridSpec{x, y, z}; }))
        .def_readwrite("x", &GridSpec::x)
        .def_readwrite("y", &GridSpec::y)
        .def_readwrite("z", &GridSpec::z)
        .def_property_readonly("shape", &GridSpec::shape);

    py::class_<ComplexField3D>(m, "Field")
        .def(py::init([](const GridSpec& g, const CArray& values) { return ComplexField3D(g, from_numpy(values, g.shape())); }),
             py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &ComplexField3D::grid)
        .def_property_readonly("domain", [](const ComplexField3D& f) { return to_string(f.domain()); })
        .def_property_readonly("values", [](const ComplexField3D& f) { return to_numpy(f.values, f.grid.shape()); });

    py::class_<KSpaceSignal>(m, "Signal")
        .def(py::init([](const AxisSpec& kx, const AxisSpec& ky, const AxisSpec& t, const CArray& values) {
                 KSpaceSignal s(kx, ky, t);
                 s.values = from_numpy(values, {kx.n, ky.n, t.n});
                 return s;
             }),
             py::arg("kx"), py::arg("ky"), py::arg("t"), py::arg("values"))
        .def_readonly("kx", &KSpaceSignal::kx)
        .def_readonly("ky", &KSpaceSignal::ky)
        .def_readonly("t", &KSpaceSignal::t)
        .def_property_readonly("values", [](const KSpaceSignal& s) { return to_numpy(s.values, {s.kx.n, s.ky.n, s.t.n}); });

    py::class_<PhysicsParams>(m, "PhysicsParams")
        .def(py::init<>())
        .def_readwrite("beta0", &PhysicsParams::beta0)
        .def_readwrite("xi", &PhysicsParams::xi)
        .def_readwrite("z_g", &PhysicsParams::z_g)
        .def_readwrite("omega_L_bar", &PhysicsParams::omega_L_bar)
        .def_readwrite("k0", &PhysicsParams::k0)
        .def_readwrite("g_omega_c", &PhysicsParams::g_omega_c);

    py::class_<CalibParams>(m, "CalibParams")
        .def(py::init<>())
        .def_readwrite("z0", &CalibParams::z0)
        .def_readwrite("zeta", &CalibParams::zeta)
        .def_readwrite("axis_scale", &CalibParams::axis_scale)
        .def_readwrite("rotation_xy", &CalibParams::rotation_xy)
        .def_readwrite("omega_L_bar", &CalibParams::omega_L_bar)
        .def_readwrite("eta_floor", &CalibParams::eta_floor)
        .def("to_json", &dump_calibration)
        .def_static("from_json", [](const std::string& s) { return parse_calibration(s); });

    py::class_<RunConfig>(m, "RunConfig")
        .def_static("default", &default_config)
        .def_static("from_json", [](const std::string& s) { return parse_config(s, "<python>"); })
        .def_static("load", &load_config)
        .def("to_json", &dump_config)
        .def("save", &save_config)
        .def_readwrite("physics", &RunConfig::physics)
        .def_readwrite("grid", &RunConfig::grid)
        .def_readwrite("times", &RunConfig::times)
        .def_readwrite("seed", &RunConfig::seed)
        .def("effective_calibration", &RunConfig::effective_calibration);

    m.def(
        "simulate",
        [](const RunConfig& c, bool no_noise, bool skip_detector) {
            py::gil_scoped_release release;
            return simulate(c, {no_noise, skip_detector});
        },
        py::arg("config"), py::arg("no_noise") = false, py::arg("skip_detector") = false);
    m.def(
        "scene",
        [](const RunConfig& c) {
            const auto s = build_scene(c);
            py::dict d;
            d["spinwave"] = s.spinwave;
            d["reference"] = s.reference;
            if (s.target_phase) {
                DArray a({c.grid.x.n, c.grid.y.n, c.grid.z.n});
                std::memcpy(a.mutable_data(), s.target_phase->values.data(), s.target_phase->values.size() * sizeof(double));
                d["target_phase"] = a;
            } else {
                d["target_phase"] = py::none();
            }
            return d;
        },
        py::arg("config"));
    m.def(
        "forward_fft",
        [](const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times, bool diffraction, double focus_plane) {
            ForwardOptions o;
            o.include_diffraction = diffraction;
            o.focus_plane = focus_plane;
            return forward_fft(s, p, times, o);
        },
        py::arg("source"), py::arg("physics"), py::arg("times"), py::arg("diffraction") = true,
        py::arg("focus_plane") = 0.0);
    m.def(
        "reconstruct",
        [](const KSpaceSignal& sig, const RunConfig& c, std::optional<CalibParams> calib) {
            py::gil_scoped_release release;
            return reconstruct(sig, c.physics, calib ? *calib : c.effective_calibration(), reconstruct_options(c));
        },
        py::arg("signal"), py::arg("config"), py::arg("calib") = py::none());
    m.def(
        "round_trip",
        [](const KSpaceSignal& sig, const RunConfig& c, std::optional<CalibParams> calib) {
            RoundTrip rt;
            {
                py::gil_scoped_release release;
                rt = evaluate_round_trip(sig, c, calib ? *calib : c.effective_calibration());
            }
            auto d = fidelity_dict(rt.fidelity);
            d["rho"] = rt.rho;
            py::array_t<std::uint8_t> mask({c.grid.x.n, c.grid.y.n, c.grid.z.n});
            std::memcpy(mask.mutable_data(), rt.mask.data(), rt.mask.size());
            d["mask"] = mask;
            return d;
        },
        py::arg("signal"), py::arg("config"), py::arg("calib") = py::none());
    m.def(
        "fit_decay",
        [](const DArray& t, const DArray& a, const std::string& mode, double angle_rad) {
            if (t.ndim() != 1 || a.ndim() != 1 || t.size() != a.size())
                throw ValidationError("fit_decay: t and amplitude must be 1D of equal length");
            DecayMode m;
            if (mode == "off") m = DecayMode::GradientOff;
            else if (mode == "on") m = DecayMode::GradientOn;
            else throw ValidationError("fit_decay: mode must be 'off' or 'on'");
            DecayFitOptions opt;
            opt.k_sw = k_sw_from_angle(angle_rad, PhysicsParams{}.k0);
            return decay_dict(fit_decay({t.data(), std::size_t(t.size())}, {a.data(), std::size_t(a.size())}, m, opt));
        },
        py::arg("t_s"), py::arg("amplitude"), py::arg("mode") = "off", py::arg("angle_rad") = 0.0);
    m.def("decoherence_envelope",
          [](double t, double tau_k, double tau_beta) { return decoherence_envelope(t, {tau_k, tau_beta}); },
          py::arg("t"), py::arg("tau_k"), py::arg("tau_beta") = std::numeric_limits<double>::infinity());
    m.def(
        "coil_field",
        [](std::array<double, 3> point, double radius, double current, std::array<double, 3> center) {
            CoilParams c;
            c.center = center;
            c.radius = radius;
            c.current = current;
            return coil_field(point, c);
        },
        py::arg("point"), py::arg("radius"), py::arg("current") = 1.0,
        py::arg("center") = std::array<double, 3>{0.0, 0.0, 0.0});

    m.def("read_field", &read_field);
    m.def("write_field", &write_field);
    m.def("read_signal", &read_signal);
    m.def("write_signal", &write_signal);
}
