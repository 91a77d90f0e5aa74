#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "radshock/chord.hpp"
#include "radshock/evolution.hpp"
#include "radshock/flux.hpp"
#include "radshock/profile.hpp"
#include "radshock/regularity.hpp"

namespace py = pybind11;
using namespace radshock;

namespace {

FluxModel make_flux(const std::string& expr) {
    for (const char* name : {"burgers", "quartic", "cubic"})
        if (expr == name) return FluxModel::builtin(name);
    return FluxModel::parse(expr);
}

py::dict profile_dict(const RadiativeProfile& p) {
    py::dict d;
    d["epsilon"] = p.epsilon;
    d["xi"] = p.xi;
    d["z"] = p.z;
    d["dz"] = p.zp;
    d["ddz"] = p.zpp;
    d["u"] = p.u;
    d["q"] = p.q;
    py::list jumps;
    for (const auto& j : p.jumps) {
        if (j.continuous) continue;
        py::dict jd;
        jd["xi0"] = j.xi0;
        jd["u_left"] = j.u_left;
        jd["u_right"] = j.u_right;
        jd["rh_residual"] = j.rh_residual;
        jd["oleinik_margin"] = j.oleinik_margin;
        jumps.append(jd);
    }
    d["jumps"] = jumps;
    d["decay_rate_left"] = p.decay_rate_left;
    d["decay_rate_right"] = p.decay_rate_right;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "radiative shock toolkit core";

    m.def(
        "shock_speed",
        [](const std::string& flux, double uminus, double uplus) {
            return shock_speed(make_flux(flux), uminus, uplus).s;
        },
        py::arg("flux"), py::arg("uminus"), py::arg("uplus"),
        "Rankine-Hugoniot speed of the (uminus, uplus) shock.");

    m.def(
        "admissibility",
        [](const std::string& flux, double uminus, double uplus) {
            FluxModel f = make_flux(flux);
            ChordFunction chord(f, shock_speed(f, uminus, uplus));
            AdmissibilityReport rep = chord.check_admissibility();
            py::dict d;
            d["oleinik_strict"] = rep.oleinik_strict;
            d["lax_strict"] = rep.lax_strict;
            d["nondegenerate"] = rep.nondegenerate;
            d["oleinik_margin"] = rep.oleinik_margin;
            d["speed"] = chord.triple().s;
            d["branch_pairs"] = chord.pair_count();
            return d;
        },
        py::arg("flux"), py::arg("uminus"), py::arg("uplus"),
        "Chord-function admissibility report for the shock.");

    m.def(
        "profile",
        [](const std::string& flux, double uminus, double uplus, double eps) {
            FluxModel f = make_flux(flux);
            ChordFunction chord(f, shock_speed(f, uminus, uplus));
            return profile_dict(assemble_profile(chord, eps));
        },
        py::arg("flux"), py::arg("uminus"), py::arg("uplus"),
        py::arg("eps") = 1.0,
        "Assemble the traveling-wave profile; jumps lists the genuine "
        "discontinuities.");

    m.def(
        "regularity",
        [](const std::string& flux, double uminus, double uplus, int nmax) {
            FluxModel f = make_flux(flux);
            ChordFunction chord(f, shock_speed(f, uminus, uplus));
            RegularityReport rep =
                expansion_and_thresholds(scaled_flux(chord), nmax);
            py::dict d;
            d["eps"] = rep.eps;
            d["eps_bar"] = rep.eps_bar;
            d["eps_n"] = rep.eps_n;
            d["u_bar"] = rep.u_bar;
            d["v_bar2"] = rep.v_bar2;
            d["lambda1"] = rep.lambda1;
            d["lambda2"] = rep.lambda2;
            d["w_bar"] = rep.w_bar;
            d["predicted_class"] = rep.predicted_class;
            return d;
        },
        py::arg("flux"), py::arg("uminus"), py::arg("uplus"),
        py::arg("nmax") = 5,
        "Smoothness thresholds and sink expansion of the scaled chord.");

    m.def(
        "verify_traveling_wave",
        [](const std::string& flux, double uminus, double uplus, double eps,
           double xmin, double xmax, int cells, double T) {
            FluxModel f = make_flux(flux);
            ShockTriple triple = shock_speed(f, uminus, uplus);
            ChordFunction chord(f, triple);
            RadiativeProfile prof = assemble_profile(chord, eps);
            EvolveParams params;
            params.eps = eps;
            Evolver ev(f, Grid1D{xmin, xmax, cells, BoundaryMode::Outflow},
                       params);
            DriftReport rep = verify_traveling_wave(ev, prof, triple.s, T);
            py::dict d;
            d["l1_drift"] = rep.l1_drift;
            d["best_shift"] = rep.best_shift;
            d["recovered_speed"] = rep.recovered_speed;
            d["speed"] = triple.s;
            return d;
        },
        py::arg("flux"), py::arg("uminus"), py::arg("uplus"), py::arg("eps"),
        py::arg("xmin"), py::arg("xmax"), py::arg("cells"), py::arg("T"),
        "Evolve the assembled profile and report the shift-minimized L1 "
        "drift.");
}
