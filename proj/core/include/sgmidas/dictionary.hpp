#pragma once

#include <Eigen/Core>

namespace sgmidas {

/// Basis family for the MIDAS lag-weight dictionary on [0,1].
enum class DictionaryFamily {
    Legendre,  // Jacobi(0,0); the default recommendation
    Jacobi,    // shifted Jacobi with parameters (a_param, b_param), both > -1
    Power,     // plain powers 1, u, u^2, ... (Almon); numerically inferior
};

/// Dictionary of L basis functions w_1..w_L of degrees 0..L-1 on [0,1].
struct DictionarySpec {
    DictionaryFamily family = DictionaryFamily::Legendre;
    int size = 1;          // L, number of basis functions including the constant
    double a_param = 0.0;  // Jacobi only
    double b_param = 0.0;  // Jacobi only

    static DictionarySpec legendre(int L);
    static DictionarySpec jacobi(int L, double a, double b);
    static DictionarySpec power(int L);

    void validate() const;  // throws std::invalid_argument
};

/// Shifted Jacobi polynomial of the given degree at u in [0,1], computed by
/// the three-term recurrence at x = 2u - 1. Standard normalization (value 1
/// at u = 1 when a_param = b_param = 0).
double jacobi_eval(double a_param, double b_param, int degree, double u);

/// One basis function of the dictionary: degree in 0..L-1.
double dictionary_eval(const DictionarySpec& spec, int degree, double u);

/// n_lags x L matrix with entry (j, l) = (1/n_lags) * w_{l+1}((j) / n_lags)
/// for j = 0..n_lags-1; lag j+1 maps to u = j / n_lags, the most recent lag
/// getting u = 0. Columns ordered by increasing degree.
Eigen::MatrixXd build_weight_matrix(const DictionarySpec& spec, int n_lags);

/// Weight function value omega(u) = sum_l coeffs[l] * w_{l+1}(u).
double weight_function_eval(const Eigen::VectorXd& coeffs, const DictionarySpec& spec, double u);

}  // namespace sgmidas
