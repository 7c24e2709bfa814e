#pragma once

#include "l1ica/types.hpp"
#include "l1ica/whitening.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace l1ica {

/// Descent-certificate values recorded at one accepted DC step.
struct CertificateRecord {
    double C = std::numeric_limits<double>::quiet_NaN();          // penalty term uses the row count of Q#
    double C_samples = std::numeric_limits<double>::quiet_NaN();  // same with the sample count N
    double inner_min = 0.0; // min_w { g(w) - grad_h^T w }
    bool available = false;
    bool condition_holds = false;
};

struct ComponentDiagnostics {
    double final_cost = 0.0;       // J_o for l1-ICA, J_f for FastICA
    double final_negentropy = 0.0; // J_f
    Index iterations = 0;
    double lipschitz = 0.0;
    Index backtracks = 0;
    Index admm_iterations = 0;
    Index restarts = 0;
    bool converged = false;
    bool degenerate = false;
    std::vector<double> cost_trace; // accepted J_o values, starting point first
    std::vector<CertificateRecord> certificates;
};

/// Fitted factorisation X_c ~ A S with S = W^T Z.
struct IcaModel {
    Matrix W; // K x K, orthonormal columns
    Matrix A; // p x K
    Matrix S; // K x N
    WhiteningModel whitening;
    std::vector<ComponentDiagnostics> components;
    std::uint64_t seed = 0;

    bool converged() const
    {
        for (const auto& c : components)
            if (!c.converged)
                return false;
        return true;
    }
};

} // namespace l1ica
