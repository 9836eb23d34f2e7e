#pragma once

// Layer-stack device model: builds the discretized one-dimensional
// potential and effective-mass profile of a gated qubit stack,
// including the electrostatic shift imposed by the neighbor qubit's
// charge state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/constants.hpp"

namespace qdot {

enum class LayerKind { channel_contact, barrier, dot_a, dot_b, gate_contact };

inline const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::channel_contact: return "channel_contact";
        case LayerKind::barrier:         return "barrier";
        case LayerKind::dot_a:           return "dot_a";
        case LayerKind::dot_b:           return "dot_b";
        case LayerKind::gate_contact:    return "gate_contact";
    }
    return "?";
}

struct Layer {
    LayerKind kind = LayerKind::barrier;
    double thickness_nm = 0.0;
    double band_offset_ev = 0.0;
    double effective_mass = 1.0;  // units of m0
};

// Center-to-center distances from this qubit's dots to the neighbor
// qubit's dots, nm.  First index: own dot, second: neighbor dot.
struct NeighborDistances {
    double aa_nm = 0.0;
    double ab_nm = 0.0;
    double ba_nm = 0.0;
    double bb_nm = 0.0;
};

struct QubitGeometry {
    std::vector<Layer> layers;       // ordered channel -> gate
    double dielectric_constant = 1.0;
    NeighborDistances distances;
};

// Occupation of the neighbor qubit's dots.  0 or 1 for basis states;
// fractional values give the mean-field shift of a superposed neighbor.
struct NeighborOccupancy {
    double rho_a = 0.0;
    double rho_b = 0.0;
};

struct LayerSpan {
    LayerKind kind;
    std::size_t first_cell;
    std::size_t cell_count;
    double x_begin_nm;
    double x_end_nm;
};

// Piecewise-constant mesh.  Cell j spans [edges[j], edges[j+1]] and
// carries potential[j] (eV) and mass[j] (m0 units); positions are the
// cell centers.
struct PotentialMesh {
    std::vector<double> edges;      // size n+1, strictly increasing
    std::vector<double> positions;  // size n, cell centers
    std::vector<double> potential;  // size n, eV
    std::vector<double> mass;       // size n, m0 units
    std::vector<LayerSpan> layers;  // may be empty for hand-built meshes

    std::size_t size() const { return potential.size(); }
    double width(std::size_t j) const { return edges[j + 1] - edges[j]; }

    const LayerSpan* find_layer(LayerKind k) const {
        for (const auto& s : layers)
            if (s.kind == k) return &s;
        return nullptr;
    }

    // Mean potential over the cells of a layer, eV.
    double mean_potential(const LayerSpan& s) const {
        double acc = 0.0, len = 0.0;
        for (std::size_t j = s.first_cell; j < s.first_cell + s.cell_count; ++j) {
            acc += potential[j] * width(j);
            len += width(j);
        }
        return acc / len;
    }
};

// Electrostatic level shift of a dot from one neighbor dot at distance
// r carrying mean occupation rho:  rho * e^2/(4 pi eps0 eps r), in eV.
inline double coulomb_shift(double dielectric_constant, double r_nm, double rho) {
    if (!(r_nm > 0.0)) throw std::domain_error("coulomb_shift: distance must be positive");
    if (!(dielectric_constant > 0.0))
        throw std::domain_error("coulomb_shift: dielectric constant must be positive");
    if (rho < 0.0 || rho > 1.0)
        throw std::domain_error("coulomb_shift: occupation outside [0,1]");
    return rho * constants::coulomb_ev_nm / (dielectric_constant * r_nm);
}

inline void validate(const QubitGeometry& g) {
    if (g.layers.size() < 3)
        throw std::invalid_argument("geometry: need at least contact/dot/contact layers");
    if (!(g.dielectric_constant > 0.0))
        throw std::invalid_argument("geometry: dielectric constant must be positive");
    int n_a = 0, n_b = 0;
    std::ptrdiff_t i_a = -1, i_b = -1;
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        const Layer& l = g.layers[i];
        if (!(l.thickness_nm > 0.0))
            throw std::invalid_argument("geometry: layer " + std::to_string(i) +
                                        " has non-positive thickness");
        if (!(l.effective_mass > 0.0))
            throw std::invalid_argument("geometry: layer " + std::to_string(i) +
                                        " has non-positive effective mass");
        if (l.kind == LayerKind::dot_a) { ++n_a; i_a = static_cast<std::ptrdiff_t>(i); }
        if (l.kind == LayerKind::dot_b) { ++n_b; i_b = static_cast<std::ptrdiff_t>(i); }
    }
    if (n_a != 1 || n_b != 1)
        throw std::invalid_argument("geometry: exactly one dot_a and one dot_b layer required");
    if (i_a > i_b)
        throw std::invalid_argument("geometry: dot_a must precede dot_b (channel -> gate)");
    if (g.layers.front().kind != LayerKind::channel_contact ||
        g.layers.back().kind != LayerKind::gate_contact)
        throw std::invalid_argument("geometry: stack must start at channel_contact and end at gate_contact");
    const auto& d = g.distances;
    for (double r : {d.aa_nm, d.ab_nm, d.ba_nm, d.bb_nm})
        if (!(r > 0.0))
            throw std::invalid_argument("geometry: neighbor distances must be positive");
}

inline void validate(const NeighborOccupancy& o) {
    if (o.rho_a < 0.0 || o.rho_a > 1.0 || o.rho_b < 0.0 || o.rho_b > 1.0)
        throw std::invalid_argument("occupancy: rho outside [0,1]");
    if (o.rho_a + o.rho_b > 1.0 + 1e-12)
        throw std::invalid_argument("occupancy: rho_a + rho_b exceeds one electron");
}

// Builds the mesh: band offsets per layer, a linear ramp of total drop
// e*gate_bias across the insulating stack (channel contact held at
// zero, gate contact at -e*gate_bias), and the neighbor Coulomb shift
// added uniformly inside each dot layer.  Cell edges coincide with
// layer boundaries; cell count per layer is proportional to thickness
// with a floor of three cells.
inline PotentialMesh build_potential(const QubitGeometry& g, double gate_bias_v,
                                     const NeighborOccupancy& occ, std::size_t n_mesh) {
    validate(g);
    validate(occ);
    const std::size_t n_layers = g.layers.size();
    if (n_mesh < 3 * n_layers)
        throw std::invalid_argument("build_potential: n_mesh must be >= 3 cells per layer");

    const double total_nm =
        std::accumulate(g.layers.begin(), g.layers.end(), 0.0,
                        [](double s, const Layer& l) { return s + l.thickness_nm; });

    // three cells per layer, remainder apportioned to thickness by
    // largest remainder; total is exactly n_mesh
    std::vector<std::size_t> cells(n_layers, 3);
    const std::size_t extra = n_mesh - 3 * n_layers;
    std::size_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> frac(n_layers);
    for (std::size_t i = 0; i < n_layers; ++i) {
        const double ideal = static_cast<double>(extra) * g.layers[i].thickness_nm / total_nm;
        const std::size_t base = static_cast<std::size_t>(ideal);
        cells[i] += base;
        assigned += base;
        frac[i] = {ideal - static_cast<double>(base), i};
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < extra; k = (k + 1) % n_layers, ++assigned)
        ++cells[frac[k].second];

    // stack extents for the ramp: everything between the two contacts
    const double x_stack_begin = g.layers.front().thickness_nm;
    const double x_stack_end = total_nm - g.layers.back().thickness_nm;
    const double stack_len = x_stack_end - x_stack_begin;

    // per-dot Coulomb shift, eV
    const double shift_a = coulomb_shift(g.dielectric_constant, g.distances.aa_nm, occ.rho_a) +
                           coulomb_shift(g.dielectric_constant, g.distances.ab_nm, occ.rho_b);
    const double shift_b = coulomb_shift(g.dielectric_constant, g.distances.ba_nm, occ.rho_a) +
                           coulomb_shift(g.dielectric_constant, g.distances.bb_nm, occ.rho_b);

    PotentialMesh mesh;
    mesh.edges.reserve(n_mesh + 1);
    mesh.positions.reserve(n_mesh);
    mesh.potential.reserve(n_mesh);
    mesh.mass.reserve(n_mesh);
    mesh.layers.reserve(n_layers);

    auto ramp = [&](double x) {
        if (x <= x_stack_begin) return 0.0;
        if (x >= x_stack_end) return -gate_bias_v;           // eV, drop = e * bias
        return -gate_bias_v * (x - x_stack_begin) / stack_len;
    };

    double x0 = 0.0;
    mesh.edges.push_back(0.0);
    for (std::size_t i = 0; i < n_layers; ++i) {
        const Layer& l = g.layers[i];
        const std::size_t nc = cells[i];
        const double h = l.thickness_nm / static_cast<double>(nc);
        double dot_shift = 0.0;
        if (l.kind == LayerKind::dot_a) dot_shift = shift_a;
        if (l.kind == LayerKind::dot_b) dot_shift = shift_b;

        mesh.layers.push_back({l.kind, mesh.positions.size(), nc, x0, x0 + l.thickness_nm});
        for (std::size_t j = 0; j < nc; ++j) {
            const double xl = x0 + h * static_cast<double>(j);
            const double xr = (j + 1 == nc) ? x0 + l.thickness_nm
                                            : x0 + h * static_cast<double>(j + 1);
            const double xc = 0.5 * (xl + xr);
            double v = l.band_offset_ev + dot_shift;
            if (l.kind == LayerKind::channel_contact) {
                // contact held flat at the channel reference
            } else if (l.kind == LayerKind::gate_contact) {
                v += -gate_bias_v;
            } else {
                v += ramp(xc);
            }
            mesh.edges.push_back(xr);
            mesh.positions.push_back(xc);
            mesh.potential.push_back(v);
            mesh.mass.push_back(l.effective_mass);
        }
        x0 += l.thickness_nm;
    }
    return mesh;
}

}  // namespace qdot
