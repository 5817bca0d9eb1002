#include "lab/fft.hpp"
#include "lab/accum.hpp"
#include <fftw3.h>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace lab {

namespace {

std::mutex planner_mtx;  // FFTW planner is not thread-safe

// per-thread plan + buffer cache, keyed by grid size; separate for each precision
struct PlansD {
    int P;
    double* real;
    fftw_complex* cplx;
    fftw_plan fwd, bwd;

    explicit PlansD(int P_) : P(P_) {
        std::lock_guard<std::mutex> lk(planner_mtx);
        std::size_t nr = (std::size_t)P * P * P;
        std::size_t nc = (std::size_t)P * P * (P / 2 + 1);
        real = fftw_alloc_real(nr);
        cplx = fftw_alloc_complex(nc);
        fwd = fftw_plan_dft_r2c_3d(P, P, P, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_3d(P, P, P, cplx, real, FFTW_ESTIMATE);
    }
    ~PlansD() {
        std::lock_guard<std::mutex> lk(planner_mtx);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

struct PlansF {
    int P;
    float* real;
    fftwf_complex* cplx;
    fftwf_plan fwd, bwd;

    explicit PlansF(int P_) : P(P_) {
        std::lock_guard<std::mutex> lk(planner_mtx);
        std::size_t nr = (std::size_t)P * P * P;
        std::size_t nc = (std::size_t)P * P * (P / 2 + 1);
        real = fftwf_alloc_real(nr);
        cplx = fftwf_alloc_complex(nc);
        fwd = fftwf_plan_dft_r2c_3d(P, P, P, real, cplx, FFTW_ESTIMATE);
        bwd = fftwf_plan_dft_c2r_3d(P, P, P, cplx, real, FFTW_ESTIMATE);
    }
    ~PlansF() {
        std::lock_guard<std::mutex> lk(planner_mtx);
        fftwf_destroy_plan(fwd);
        fftwf_destroy_plan(bwd);
        fftwf_free(real);
        fftwf_free(cplx);
    }
};

thread_local std::map<int, std::unique_ptr<PlansD>> cache_d;
thread_local std::map<int, std::unique_ptr<PlansF>> cache_f;

PlansD& plans_d(int P) {
    auto& slot = cache_d[P];
    if (!slot) slot = std::make_unique<PlansD>(P);
    return *slot;
}
PlansF& plans_f(int P) {
    auto& slot = cache_f[P];
    if (!slot) slot = std::make_unique<PlansF>(P);
    return *slot;
}

// place band-N coefficients into the half-complex layout (last axis halved, n2 -> i2)
template <class Plans, class C>
void place(const Plans& pl, int N, const C* a, const HalfCube& hc) {
    int P = pl.P;
    std::size_t nc = (std::size_t)P * P * (P / 2 + 1);
    std::memset(pl.cplx, 0, nc * sizeof(pl.cplx[0]));
    const std::size_t stride2 = (std::size_t)(P / 2 + 1);
    for (int n2 = 0; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1) {
            int i1 = (n1 + P) % P;
            for (int n0 = -N; n0 <= N; ++n0) {
                int i0 = (n0 + P) % P;
                auto v = a[hc.flat({n0, n1, n2})];
                auto* dst = pl.cplx[((std::size_t)i0 * P + i1) * stride2 + n2];
                dst[0] = v.real();
                dst[1] = v.imag();
            }
        }
}

template <class Plans, class C, class T>
void extract(const Plans& pl, int N, C* a, const HalfCube& hc, T scale) {
    int P = pl.P;
    const std::size_t stride2 = (std::size_t)(P / 2 + 1);
    for (int n2 = 0; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1) {
            int i1 = (n1 + P) % P;
            for (int n0 = -N; n0 <= N; ++n0) {
                int i0 = (n0 + P) % P;
                auto* src = pl.cplx[((std::size_t)i0 * P + i1) * stride2 + n2];
                a[hc.flat({n0, n1, n2})] = C{(T)(src[0] * scale), (T)(src[1] * scale)};
            }
        }
}

} // namespace

void synth(const SpectralField& u, int P, std::vector<double>& grid) {
    if (P < 2 * u.N + 1) throw std::invalid_argument("synth: grid too small for band");
    auto& pl = plans_d(P);
    place(pl, u.N, u.a.data(), u.hc);
    fftw_execute(pl.bwd);
    grid.assign(pl.real, pl.real + (std::size_t)P * P * P);
}

void analyze(const std::vector<double>& grid, int P, SpectralField& u) {
    if ((std::size_t)P * P * P != grid.size()) throw std::invalid_argument("analyze: size mismatch");
    if (P < 2 * u.N + 1) throw std::invalid_argument("analyze: grid too small for band");
    auto& pl = plans_d(P);
    std::memcpy(pl.real, grid.data(), grid.size() * sizeof(double));
    fftw_execute(pl.fwd);
    extract(pl, u.N, u.a.data(), u.hc, 1.0 / ((double)P * P * P));
    u.resymmetrize_plane();
}

void synth(const SpectralFieldF& u, int P, std::vector<float>& grid) {
    if (P < 2 * u.N + 1) throw std::invalid_argument("synth: grid too small for band");
    auto& pl = plans_f(P);
    place(pl, u.N, u.a.data(), u.hc);
    fftwf_execute(pl.bwd);
    grid.assign(pl.real, pl.real + (std::size_t)P * P * P);
}

void analyze(const std::vector<float>& grid, int P, SpectralFieldF& u) {
    if ((std::size_t)P * P * P != grid.size()) throw std::invalid_argument("analyze: size mismatch");
    if (P < 2 * u.N + 1) throw std::invalid_argument("analyze: grid too small for band");
    auto& pl = plans_f(P);
    std::memcpy(pl.real, grid.data(), grid.size() * sizeof(float));
    fftwf_execute(pl.fwd);
    extract(pl, u.N, u.a.data(), u.hc, 1.0f / ((float)P * P * P));
    u.resymmetrize_plane();
}

void multiply(const SpectralField& f, const SpectralField& g, SpectralField& out) {
    int P = product_grid(out.N, f.N, g.N);
    std::vector<double> gf, gg;
    synth(f, P, gf);
    synth(g, P, gg);
    for (std::size_t i = 0; i < gf.size(); ++i) gf[i] *= gg[i];
    analyze(gf, P, out);
}

void fft_cleanup() {
    cache_d.clear();
    cache_f.clear();
}

struct PackedCubic::Impl {
    int N, P;
    fftwf_complex* in;
    fftwf_complex* out;
    fftwf_plan plan;
    std::vector<std::size_t> slot;  // grid position of each cube mode, scan order (n2, n1, n0)
    std::vector<float> scale;       // 1/<n> aligned with slot
    std::vector<float> buf;
    std::size_t zero_slot = 0;

    Impl(int N_, int P_) : N(N_), P(P_) {
        if (P < 2 * N + 1) throw std::invalid_argument("packed cubic: grid too small for band");
        std::size_t n = (std::size_t)P * P * P;
        {
            std::lock_guard<std::mutex> lk(planner_mtx);
            in = fftwf_alloc_complex(n);
            out = fftwf_alloc_complex(n);
            // backward sign matches the e^{+in.x} synthesis convention
            plan = fftwf_plan_dft_3d(P, P, P, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        std::memset(in, 0, n * sizeof(fftwf_complex));
        std::size_t cube = (std::size_t)(2 * N + 1) * (2 * N + 1) * (2 * N + 1);
        slot.reserve(cube);
        scale.reserve(cube);
        for (int n2 = -N; n2 <= N; ++n2) {
            std::size_t i2 = (std::size_t)((n2 + P) % P);
            for (int n1 = -N; n1 <= N; ++n1) {
                std::size_t i1 = (std::size_t)((n1 + P) % P);
                for (int n0 = -N; n0 <= N; ++n0) {
                    std::size_t i0 = (std::size_t)((n0 + P) % P);
                    if (n0 == 0 && n1 == 0 && n2 == 0) zero_slot = slot.size();
                    slot.push_back((i0 * P + i1) * P + i2);
                    scale.push_back((float)(1.0 / bracket({n0, n1, n2})));
                }
            }
        }
        buf.resize(2 * slot.size());
    }
    ~Impl() {
        std::lock_guard<std::mutex> lk(planner_mtx);
        fftwf_destroy_plan(plan);
        fftwf_free(in);
        fftwf_free(out);
    }
};

PackedCubic::PackedCubic(int N, int P) : impl_(std::make_unique<Impl>(N, P)) {}
PackedCubic::~PackedCubic() = default;

void PackedCubic::load(const SpectralFieldF& u, const SpectralFieldF& w) {
    auto& im = *impl_;
    if (u.N != im.N || w.N != im.N) throw std::invalid_argument("packed cubic: band mismatch");
    std::size_t i = 0;
    for (int n2 = -im.N; n2 <= im.N; ++n2)
        for (int n1 = -im.N; n1 <= im.N; ++n1)
            for (int n0 = -im.N; n0 <= im.N; ++n0, ++i) {
                auto a = u.at({n0, n1, n2});
                auto b = w.at({n0, n1, n2});
                im.in[im.slot[i]][0] = a.real() - b.imag();
                im.in[im.slot[i]][1] = a.imag() + b.real();
            }
}

void PackedCubic::load_random(Rng& rng) {
    auto& im = *impl_;
    rng.fill_normal(im.buf.data(), im.buf.size());
    for (std::size_t i = 0; i < im.slot.size(); ++i) {
        im.in[im.slot[i]][0] = im.scale[i] * im.buf[2 * i];
        im.in[im.slot[i]][1] = im.scale[i] * im.buf[2 * i + 1];
    }
}

double PackedCubic::mean_re2_im() {
    auto& im = *impl_;
    fftwf_execute(im.plan);
    std::size_t n = (std::size_t)im.P * im.P * im.P;
    Kahan s;
    for (std::size_t i = 0; i < n; ++i) {
        double re = im.out[i][0], w = im.out[i][1];
        s.add(re * re * w);
    }
    return s.value() / (double)n;
}

double PackedCubic::u0() const { return impl_->in[impl_->slot[impl_->zero_slot]][0]; }
double PackedCubic::w0() const { return impl_->in[impl_->slot[impl_->zero_slot]][1]; }

} // namespace lab
