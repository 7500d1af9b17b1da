#pragma once

#include <cmath>
#include <stdexcept>

namespace hsbnet {

enum class Mode { Sem, Bit };

/// Bit-rate-to-message-rate surrogate Re(r) = beta * ln(1 + r / knee).
/// Strictly increasing and concave on [0, inf) with Re(0) = 0.
struct B2MSurrogateParams {
    double beta_msg_s = 100.0;  // saturation scale, msg/s
    double knee_bit_s = 1e6;    // bit rate where the curve bends, bit/s
};

inline double re_eval(double bit_rate, const B2MSurrogateParams& params) {
    if (bit_rate < 0.0) throw std::invalid_argument("re_eval: negative bit rate");
    return params.beta_msg_s * std::log1p(bit_rate / params.knee_bit_s);
}

/// d Re / d r, used by the KKT bandwidth allocator.
inline double re_derivative(double bit_rate, const B2MSurrogateParams& params) {
    return params.beta_msg_s / (params.knee_bit_s + bit_rate);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Shannon bit rate z * log2(1 + gamma) for a mean SINR given in dB.
inline double shannon_bit_rate(double z_hz, double mean_sinr_db) {
    return z_hz * std::log2(1.0 + db_to_linear(mean_sinr_db));
}

/// Time-averaged SemCom message rate tau * Re(z * log2(1 + gamma)).
inline double semantic_rate(double z_hz, double mean_sinr_db, double tau,
                            const B2MSurrogateParams& params) {
    return tau * re_eval(shannon_bit_rate(z_hz, mean_sinr_db), params);
}

/// Time-averaged BitCom message rate rho * z * log2(1 + gamma).
inline double bitcom_rate(double z_hz, double mean_sinr_db, double rho) {
    return rho * shannon_bit_rate(z_hz, mean_sinr_db);
}

inline double link_rate(Mode mode, double z_hz, double mean_sinr_db, double tau, double rho,
                        const B2MSurrogateParams& params) {
    return mode == Mode::Sem ? semantic_rate(z_hz, mean_sinr_db, tau, params)
                             : bitcom_rate(z_hz, mean_sinr_db, rho);
}

}  // namespace hsbnet
