#pragma once
#include "lab/spectrum.hpp"
#include <memory>
#include <vector>

namespace lab {

// Torus transforms with the convention u(x) = sum_n a(n) e^{in.x} and the
// normalized volume element, so analyze(synth(a)) = a exactly (up to roundoff)
// whenever P >= 2N+1, and (1/P^3) sum_grid of a product of trig polynomials
// equals the integral when P exceeds the total degree.
//
// synth:   coefficients (band N) -> P^3 real samples
// analyze: P^3 real samples -> coefficients (band N), includes the 1/P^3
void synth(const SpectralField& u, int P, std::vector<double>& grid);
void analyze(const std::vector<double>& grid, int P, SpectralField& u);
void synth(const SpectralFieldF& u, int P, std::vector<float>& grid);
void analyze(const std::vector<float>& grid, int P, SpectralFieldF& u);

// band-exact product: out = projection of f*g onto cube(out.N);
// grid chosen so no alias image of the true spectrum lands in the kept band
void multiply(const SpectralField& f, const SpectralField& g, SpectralField& out);

// P large enough that band `keep` of a product of bands n1,n2(,n3) is alias-free
inline int product_grid(int keep, int na, int nb, int nc = 0) {
    return good_fft_size(na + nb + nc + keep + 1);
}

void fft_cleanup();  // drop cached plans (leak checkers)

// One-transform cubic integrals: a band-N pair (u, w) is loaded as the packed
// complex spectrum z-hat = u-hat + i w-hat on the full cube, one c2c transform
// puts u and w in the real and imaginary grid parts, and the reduction returns
// the quadrature mean of u^2 w on the P-grid. load_random fills every cube
// mode with an independent complex normal scaled by 1/<n>, which makes
// (Re z, Im z) an independent free-field pair for one transform instead of two.
class PackedCubic {
public:
    PackedCubic(int N, int P);
    ~PackedCubic();
    PackedCubic(const PackedCubic&) = delete;
    PackedCubic& operator=(const PackedCubic&) = delete;

    void load(const SpectralFieldF& u, const SpectralFieldF& w);
    void load_random(Rng& rng);
    double mean_re2_im();  // executes the transform; the loaded spectrum survives
    double u0() const;     // mean of the u component of the current load
    double w0() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lab
