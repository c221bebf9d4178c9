// phase_point.cpp: phase-space points in the supported layouts.
#include "nhbrack/phase_point.hpp"

#include "nhbrack/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nhbrack {

std::string_view to_string(Layout layout) {
    switch (layout) {
        case Layout::NVE: return "nve";
        case Layout::Nose: return "nose";
        case Layout::NHC2: return "nhc2";
        case Layout::NPT: return "npt";
    }
    return "unknown";
}

Layout layout_from_string(std::string_view name) {
    if (name == "nve") return Layout::NVE;
    if (name == "nose") return Layout::Nose;
    if (name == "nhc2") return Layout::NHC2;
    if (name == "npt") return Layout::NPT;
    throw std::invalid_argument("unknown ensemble kind '" + std::string(name) + "'");
}

int LayoutIndex::dim() const {
    switch (layout) {
        case Layout::NVE: return 2 * n_phys;
        case Layout::Nose: return 2 * n_phys + 2;
        case Layout::NHC2: return 2 * n_phys + 4;
        case Layout::NPT: return 2 * n_phys + 4;
    }
    return 0;
}

int LayoutIndex::chain_length() const {
    switch (layout) {
        case Layout::NVE: return 0;
        case Layout::NHC2: return 2;
        default: return 1;
    }
}

int LayoutIndex::eta(int link) const {
    if (link >= chain_length()) throw StructuralError("layout has no thermostat link " + std::to_string(link));
    return n_phys + link;
}

int LayoutIndex::p_eta(int link) const { return coordinate_count() + eta(link); }

int LayoutIndex::volume() const {
    if (layout != Layout::NPT) throw StructuralError("volume only exists in the NPT layout");
    return n_phys + 1;
}

int LayoutIndex::p_volume() const { return coordinate_count() + volume(); }

std::vector<std::string> LayoutIndex::names() const {
    std::vector<std::string> out(static_cast<std::size_t>(dim()));
    auto block = [&](const std::string& stem, int offset) {
        for (int k = 0; k < n_phys; ++k) {
            out[static_cast<std::size_t>(offset + k)] = n_phys == 1 ? stem : stem + std::to_string(k + 1);
        }
    };
    block("R", r(0));
    block("P", p(0));
    switch (layout) {
        case Layout::NVE: break;
        case Layout::Nose:
            out[eta()] = "eta";
            out[p_eta()] = "p_eta";
            break;
        case Layout::NHC2:
            out[eta(0)] = "eta1";
            out[eta(1)] = "eta2";
            out[p_eta(0)] = "p_eta1";
            out[p_eta(1)] = "p_eta2";
            break;
        case Layout::NPT:
            out[eta()] = "eta";
            out[volume()] = "V";
            out[p_eta()] = "p_eta";
            out[p_volume()] = "p_V";
            break;
    }
    return out;
}

PhasePoint::PhasePoint(Layout layout, int n_phys, Eigen::VectorXd coords)
    : index_{layout, n_phys}, coords_(std::move(coords)) {
    if (n_phys < 1) throw StructuralError("n_phys must be >= 1");
    if (coords_.size() != index_.dim()) {
        throw StructuralError("phase point has " + std::to_string(coords_.size()) + " entries, layout '" +
                              std::string(to_string(layout)) + "' needs " + std::to_string(index_.dim()));
    }
    if (!coords_.allFinite()) throw std::invalid_argument("phase point has non-finite entries");
    if (layout == Layout::NPT && !(coords_[index_.volume()] > 0.0)) {
        throw std::invalid_argument("NPT phase point needs V > 0");
    }
}

}  // namespace nhbrack
