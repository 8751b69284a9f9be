#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latticeforge/report.hpp"
#include "latticeforge/rng.hpp"
#include "latticeforge/stc.hpp"

namespace latticeforge {

// Entries with independent N(0, variance / 2) real and imaginary parts.
CMatrix complex_gaussian(int rows, int cols, double variance, Rng& rng);

struct ChannelRealization {
    CMatrix h;
    double sigma_h2 = 0.5;
    double snr = 0.0;
};

// Real and imaginary parts i.i.d. N(0, sigma_h2).
ChannelRealization sample_channel(int n_r, int n_t, double sigma_h2, Rng& rng, double snr = 0.0);

// Y = H X + N, with N entries CN(0, sigma_n2).
CMatrix transmit(const SpaceTimeCode& code, const IntVector& coords, const CMatrix& h, double sigma_n2, Rng& rng);

// Average transmit power per channel use, E ||X||_F^2 / T for uniform symbols.
double average_power(const SpaceTimeCode& code);

// argmin over s in alphabet^k of ||y - G s||, by QR and Schnorr-Euchner depth-first search.
IntVector sphere_decode_real(const Matrix& g, const Vector& y, const std::vector<std::int64_t>& alphabet);
IntVector sphere_decode(const SpaceTimeCode& code, const CMatrix& h, const CMatrix& y);

struct AFRelayFrame {
    int relays = 1;
    int n_t = 1;  // source antennas
    int n_R = 1;  // relay antennas
    int n_r = 1;  // destination antennas
    double rho1 = 1.0, rho2 = 1.0, rho3 = 1.0, rho1p = 1.0;
    CMatrix h_d;                 // n_r x n_t
    std::vector<CMatrix> h_rm;   // n_R x n_t
    std::vector<CMatrix> h_dm;   // n_r x n_R
    std::vector<CMatrix> b;      // n_R x n_R
};

// CN(0, 1) channels; B_m = I / sqrt(1 + rho1'^2 n_t) keeps the relay output at unit power per antenna.
AFRelayFrame sample_af_frame(int relays, int n_t, int n_R, int n_r, double rho1, double rho2, double rho3,
                             double rho1p, Rng& rng);

struct AFVirtualChannel {
    // H_eq = [H_1 ... H_M], H_m = [[rho1 H_D, 0], [rho3 rho1' H_Dm B_m H_Rm, rho2 H_D]].
    CMatrix h_eq;
    std::vector<CMatrix> blocks;
    // Per-frame noise covariance in units of the noise variance, and W_m with W_m C_m W_m^H = I.
    std::vector<CMatrix> covariance;
    std::vector<CMatrix> whitening;
    bool colored = false;
};

AFVirtualChannel af_virtual_channel(const AFRelayFrame& frame);

// Half-frame outputs [Y_m1; Y_m2] of frame m from the physical two-hop model.
// x_m = [X_m1; X_m2] is 2 n_t x L; relay and destination noise are CN(0, sigma2).
CMatrix af_receive(const AFRelayFrame& frame, int m, const CMatrix& x_m, double sigma2, Rng& rng);

IntVector af_decode(const SpaceTimeCode& code, const AFRelayFrame& frame, const AFVirtualChannel& vc,
                    const std::vector<CMatrix>& y_frames);

struct ChannelModel {
    enum class Kind { Rayleigh, AFRelay } kind = Kind::Rayleigh;
    int n_r = 2;
    double sigma_h2 = 0.5;
    // AF parameters; the code must be 2 n_t M rows by M L columns, block diagonal over frames.
    int relays = 1, n_t = 1, n_R = 1;
    double rho1 = 1.0, rho2 = 1.0, rho3 = 1.0, rho1p = 1.0;
};

// Codeword error rate per SNR (dB, rho = P / sigma_n^2); +inf means noiseless.
SimulationReport monte_carlo_cwer(const SpaceTimeCode& code, const std::vector<double>& snr_db, std::size_t trials,
                                  std::uint64_t seed, const ChannelModel& model = {}, int threads = 0);

nlohmann::json to_json(const ChannelModel& model);

}  // namespace latticeforge
