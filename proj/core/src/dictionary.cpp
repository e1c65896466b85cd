#include "sgmidas/dictionary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgmidas {

DictionarySpec DictionarySpec::legendre(int L) {
    DictionarySpec s;
    s.family = DictionaryFamily::Legendre;
    s.size = L;
    s.validate();
    return s;
}

DictionarySpec DictionarySpec::jacobi(int L, double a, double b) {
    DictionarySpec s;
    s.family = DictionaryFamily::Jacobi;
    s.size = L;
    s.a_param = a;
    s.b_param = b;
    s.validate();
    return s;
}

DictionarySpec DictionarySpec::power(int L) {
    DictionarySpec s;
    s.family = DictionaryFamily::Power;
    s.size = L;
    s.validate();
    return s;
}

void DictionarySpec::validate() const {
    if (size < 1) throw std::invalid_argument("DictionarySpec: size L must be >= 1");
    if (family == DictionaryFamily::Jacobi && (a_param <= -1.0 || b_param <= -1.0)) {
        throw std::invalid_argument("DictionarySpec: Jacobi parameters must be > -1");
    }
}

double jacobi_eval(double a, double b, int degree, double u) {
    if (a <= -1.0 || b <= -1.0) {
        throw std::invalid_argument("jacobi_eval: parameters must be > -1");
    }
    if (degree < 0) throw std::invalid_argument("jacobi_eval: degree must be >= 0");
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("jacobi_eval: u must be in [0,1]");

    const double x = 2.0 * u - 1.0;
    if (degree == 0) return 1.0;

    double p_prev = 1.0;
    double p = 0.5 * ((a + b + 2.0) * x + (a - b));
    for (int n = 1; n < degree; ++n) {
        // P_{n+1} = (an*x + bn)*P_n - cn*P_{n-1}; 2n+a+b > 0 for n >= 1.
        const double s = 2.0 * n + a + b;
        const double an = (s + 1.0) * (s + 2.0) / (2.0 * (n + 1.0) * (n + a + b + 1.0));
        const double bn = (s + 1.0) * (a * a - b * b) / (2.0 * (n + 1.0) * (n + a + b + 1.0) * s);
        const double cn = (a + n) * (b + n) * (s + 2.0) / ((n + 1.0) * (n + a + b + 1.0) * s);
        const double p_next = (an * x + bn) * p - cn * p_prev;
        p_prev = p;
        p = p_next;
    }
    return p;
}

double dictionary_eval(const DictionarySpec& spec, int degree, double u) {
    spec.validate();
    if (degree < 0 || degree >= spec.size) {
        throw std::invalid_argument("dictionary_eval: degree " + std::to_string(degree) +
                                    " outside dictionary of size " + std::to_string(spec.size));
    }
    switch (spec.family) {
        case DictionaryFamily::Legendre:
            return jacobi_eval(0.0, 0.0, degree, u);
        case DictionaryFamily::Jacobi:
            return jacobi_eval(spec.a_param, spec.b_param, degree, u);
        case DictionaryFamily::Power:
            return std::pow(u, degree);
    }
    throw std::logic_error("dictionary_eval: unknown family");
}

Eigen::MatrixXd build_weight_matrix(const DictionarySpec& spec, int n_lags) {
    spec.validate();
    if (n_lags < 1) throw std::invalid_argument("build_weight_matrix: n_lags must be >= 1");

    Eigen::MatrixXd W(n_lags, spec.size);
    const double scale = 1.0 / static_cast<double>(n_lags);
    for (int j = 0; j < n_lags; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(n_lags);
        for (int l = 0; l < spec.size; ++l) {
            W(j, l) = scale * dictionary_eval(spec, l, u);
        }
    }
    return W;
}

double weight_function_eval(const Eigen::VectorXd& coeffs, const DictionarySpec& spec, double u) {
    spec.validate();
    if (coeffs.size() != spec.size) {
        throw std::invalid_argument("weight_function_eval: coefficient length " +
                                    std::to_string(coeffs.size()) + " != dictionary size " +
                                    std::to_string(spec.size));
    }
    double value = 0.0;
    for (int l = 0; l < spec.size; ++l) {
        value += coeffs[l] * dictionary_eval(spec, l, u);
    }
    return value;
}

}  // namespace sgmidas
