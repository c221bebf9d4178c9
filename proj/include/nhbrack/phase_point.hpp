// phase_point.hpp: extended phase-space layouts and points.
//
// Coordinates come first, momenta second, in the same order:
//   NVE  = (R, P)
//   Nose = (R, eta, P, p_eta)
//   NHC2 = (R, eta1, eta2, P, p_eta1, p_eta2)
//   NPT  = (R, eta, V, P, p_eta, p_V)
// R and P are blocks of n_phys entries each.
#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace nhbrack {

enum class Layout { NVE, Nose, NHC2, NPT };

std::string_view to_string(Layout layout);
Layout layout_from_string(std::string_view name);

// Index arithmetic for one layout with n_phys physical degrees of freedom.
struct LayoutIndex {
    Layout layout{Layout::NVE};
    int n_phys{1};

    int dim() const;
    int coordinate_count() const { return dim() / 2; }
    int r(int k = 0) const { return k; }
    int p(int k = 0) const { return coordinate_count() + k; }
    // Thermostat coordinate/momentum; link 0 or 1 for NHC2.
    int eta(int link = 0) const;
    int p_eta(int link = 0) const;
    int volume() const;
    int p_volume() const;
    bool has_thermostat() const { return layout != Layout::NVE; }
    int chain_length() const;

    // Axis names, e.g. {"R", "eta", "P", "p_eta"}; R1, R2, ... when n_phys > 1.
    std::vector<std::string> names() const;
};

class PhasePoint {
public:
    PhasePoint(Layout layout, int n_phys, Eigen::VectorXd coords);

    Layout layout() const { return index_.layout; }
    const LayoutIndex& index() const { return index_; }
    const Eigen::VectorXd& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[i]; }

private:
    LayoutIndex index_;
    Eigen::VectorXd coords_;
};

}  // namespace nhbrack
