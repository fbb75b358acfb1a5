#include "olab/metric/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace olab::metric {

double standardNormal(Engine& rng) {
    double u1 = uniformUnit(rng);
    while (u1 <= 0.0) u1 = uniformUnit(rng);
    const double u2 = uniformUnit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

void heInit(Param& p, std::size_t fanIn, Engine& rng) {
    const double sd = std::sqrt(2.0 / static_cast<double>(fanIn));
    for (auto& w : p.value) w = static_cast<float>(standardNormal(rng) * sd);
}

/// 3x3 convolution, stride 1, zero padding 1.
class Conv3x3 : public Layer {
public:
    Conv3x3(int inC, int outC, Engine& rng) : inC_(inC), outC_(outC), w_(static_cast<std::size_t>(outC) * inC * 9), b_(static_cast<std::size_t>(outC)) {
        heInit(w_, static_cast<std::size_t>(inC) * 9, rng);
    }

    Tensor forward(const Tensor& in) override {
        if (in.c != inC_) throw std::logic_error("conv channel mismatch");
        h_ = in.h;
        w_in_ = in.w;
        const int ph = h_ + 2, pw = w_in_ + 2;
        padded_.assign(static_cast<std::size_t>(inC_) * ph * pw, 0.0f);
        for (int c = 0; c < inC_; ++c) {
            for (int y = 0; y < h_; ++y) {
                std::memcpy(&padded_[(static_cast<std::size_t>(c) * ph + y + 1) * pw + 1], &in.data[(static_cast<std::size_t>(c) * h_ + y) * w_in_],
                            sizeof(float) * static_cast<std::size_t>(w_in_));
            }
        }
        Tensor out(outC_, h_, w_in_);
        for (int o = 0; o < outC_; ++o) {
            float* dst = &out.data[static_cast<std::size_t>(o) * h_ * w_in_];
            std::fill(dst, dst + static_cast<std::ptrdiff_t>(h_) * w_in_, b_.value[static_cast<std::size_t>(o)]);
            for (int c = 0; c < inC_; ++c) {
                const float* k = &w_.value[(static_cast<std::size_t>(o) * inC_ + c) * 9];
                const float* src = &padded_[static_cast<std::size_t>(c) * ph * pw];
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const float wk = k[ky * 3 + kx];
                        for (int y = 0; y < h_; ++y) {
                            const float* s = src + static_cast<std::ptrdiff_t>(y + ky) * pw + kx;
                            float* d = dst + static_cast<std::ptrdiff_t>(y) * w_in_;
                            for (int x = 0; x < w_in_; ++x) d[x] += wk * s[x];
                        }
                    }
                }
            }
        }
        return out;
    }

    Tensor backward(const Tensor& dOut) override {
        const int ph = h_ + 2, pw = w_in_ + 2;
        std::vector<float> dPadded(padded_.size(), 0.0f);
        for (int o = 0; o < outC_; ++o) {
            const float* g = &dOut.data[static_cast<std::size_t>(o) * h_ * w_in_];
            float bsum = 0.0f;
            for (int i = 0; i < h_ * w_in_; ++i) bsum += g[i];
            b_.grad[static_cast<std::size_t>(o)] += bsum;
            for (int c = 0; c < inC_; ++c) {
                const std::size_t kbase = (static_cast<std::size_t>(o) * inC_ + c) * 9;
                const float* src = &padded_[static_cast<std::size_t>(c) * ph * pw];
                float* dsrc = &dPadded[static_cast<std::size_t>(c) * ph * pw];
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const float wk = w_.value[kbase + static_cast<std::size_t>(ky * 3 + kx)];
                        float acc = 0.0f;
                        for (int y = 0; y < h_; ++y) {
                            const float* s = src + static_cast<std::ptrdiff_t>(y + ky) * pw + kx;
                            float* ds = dsrc + static_cast<std::ptrdiff_t>(y + ky) * pw + kx;
                            const float* gy = g + static_cast<std::ptrdiff_t>(y) * w_in_;
                            for (int x = 0; x < w_in_; ++x) {
                                acc += gy[x] * s[x];
                                ds[x] += wk * gy[x];
                            }
                        }
                        w_.grad[kbase + static_cast<std::size_t>(ky * 3 + kx)] += acc;
                    }
                }
            }
        }
        Tensor dIn(inC_, h_, w_in_);
        for (int c = 0; c < inC_; ++c) {
            for (int y = 0; y < h_; ++y) {
                std::memcpy(&dIn.data[(static_cast<std::size_t>(c) * h_ + y) * w_in_], &dPadded[(static_cast<std::size_t>(c) * ph + y + 1) * pw + 1],
                            sizeof(float) * static_cast<std::size_t>(w_in_));
            }
        }
        return dIn;
    }

    void collect(std::vector<Param*>& out) override {
        out.push_back(&w_);
        out.push_back(&b_);
    }

private:
    int inC_;
    int outC_;
    Param w_;
    Param b_;
    int h_ = 0;
    int w_in_ = 0;
    std::vector<float> padded_;
};

class Relu : public Layer {
public:
    Tensor forward(const Tensor& in) override {
        out_ = in;
        for (auto& v : out_.data) v = std::max(v, 0.0f);
        return out_;
    }
    Tensor backward(const Tensor& dOut) override {
        Tensor d = dOut;
        for (std::size_t i = 0; i < d.data.size(); ++i) {
            if (out_.data[i] <= 0.0f) d.data[i] = 0.0f;
        }
        return d;
    }

private:
    Tensor out_;
};

class MaxPool2 : public Layer {
public:
    Tensor forward(const Tensor& in) override {
        if (in.h % 2 != 0 || in.w % 2 != 0) throw std::logic_error("maxpool needs even dimensions");
        inShape_ = {in.c, in.h, in.w};
        Tensor out(in.c, in.h / 2, in.w / 2);
        argmax_.assign(out.data.size(), 0);
        std::size_t k = 0;
        for (int c = 0; c < in.c; ++c) {
            for (int y = 0; y < out.h; ++y) {
                for (int x = 0; x < out.w; ++x, ++k) {
                    std::size_t best = (static_cast<std::size_t>(c) * in.h + 2 * y) * in.w + 2 * x;
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            const std::size_t i = (static_cast<std::size_t>(c) * in.h + 2 * y + dy) * in.w + 2 * x + dx;
                            if (in.data[i] > in.data[best]) best = i;
                        }
                    }
                    out.data[k] = in.data[best];
                    argmax_[k] = best;
                }
            }
        }
        return out;
    }
    Tensor backward(const Tensor& dOut) override {
        Tensor d(inShape_[0], inShape_[1], inShape_[2]);
        for (std::size_t k = 0; k < dOut.data.size(); ++k) d.data[argmax_[k]] += dOut.data[k];
        return d;
    }

private:
    std::array<int, 3> inShape_{};
    std::vector<std::size_t> argmax_;
};

/// relu(x + conv(relu(conv(x)))).
class ResidualBlock : public Layer {
public:
    ResidualBlock(int channels, Engine& rng) : a_(channels, channels, rng), b_(channels, channels, rng) {}

    Tensor forward(const Tensor& in) override {
        Tensor y = b_.forward(reluMid_.forward(a_.forward(in)));
        for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += in.data[i];
        return reluOut_.forward(y);
    }
    Tensor backward(const Tensor& dOut) override {
        const Tensor dSum = reluOut_.backward(dOut);
        Tensor dIn = a_.backward(reluMid_.backward(b_.backward(dSum)));
        for (std::size_t i = 0; i < dIn.data.size(); ++i) dIn.data[i] += dSum.data[i];
        return dIn;
    }
    void collect(std::vector<Param*>& out) override {
        a_.collect(out);
        b_.collect(out);
    }

private:
    Conv3x3 a_;
    Relu reluMid_;
    Conv3x3 b_;
    Relu reluOut_;
};

/// Scores each of the 64 cells from [f, f - mean(f)] with a shared
/// two-layer perceptron. Input is a C x 8 x 8 map; output is 1 x 8 x 8.
class CellHead : public Layer {
public:
    CellHead(int channels, int hidden, Engine& rng)
        : c_(channels), hidden_(hidden), w1_(static_cast<std::size_t>(hidden) * 2 * channels), b1_(static_cast<std::size_t>(hidden)),
          w2_(static_cast<std::size_t>(hidden)), b2_(1) {
        heInit(w1_, static_cast<std::size_t>(2 * channels), rng);
        const double sd = std::sqrt(1.0 / hidden);
        for (auto& w : w2_.value) w = static_cast<float>(standardNormal(rng) * sd);
    }

    Tensor forward(const Tensor& in) override {
        if (in.c != c_ || in.h != kGridDim || in.w != kGridDim) throw std::logic_error("head expects C x 8 x 8");
        const int in2 = 2 * c_;
        z_.assign(static_cast<std::size_t>(kGridCells) * in2, 0.0f);
        std::vector<float> mean(static_cast<std::size_t>(c_), 0.0f);
        for (int ch = 0; ch < c_; ++ch) {
            float s = 0.0f;
            for (int i = 0; i < kGridCells; ++i) s += in.data[static_cast<std::size_t>(ch) * kGridCells + i];
            mean[static_cast<std::size_t>(ch)] = s / kGridCells;
        }
        for (int i = 0; i < kGridCells; ++i) {
            float* z = &z_[static_cast<std::size_t>(i) * in2];
            for (int ch = 0; ch < c_; ++ch) {
                const float f = in.data[static_cast<std::size_t>(ch) * kGridCells + i];
                z[ch] = f;
                z[c_ + ch] = f - mean[static_cast<std::size_t>(ch)];
            }
        }
        hid_.assign(static_cast<std::size_t>(kGridCells) * hidden_, 0.0f);
        Tensor out(1, kGridDim, kGridDim);
        for (int i = 0; i < kGridCells; ++i) {
            const float* z = &z_[static_cast<std::size_t>(i) * in2];
            float* h = &hid_[static_cast<std::size_t>(i) * hidden_];
            float y = b2_.value[0];
            for (int j = 0; j < hidden_; ++j) {
                const float* w = &w1_.value[static_cast<std::size_t>(j) * in2];
                float a = b1_.value[static_cast<std::size_t>(j)];
                for (int k = 0; k < in2; ++k) a += w[k] * z[k];
                h[j] = std::max(a, 0.0f);
                y += w2_.value[static_cast<std::size_t>(j)] * h[j];
            }
            out.data[static_cast<std::size_t>(i)] = y;
        }
        return out;
    }

    Tensor backward(const Tensor& dOut) override {
        const int in2 = 2 * c_;
        Tensor dIn(c_, kGridDim, kGridDim);
        std::vector<float> dMean(static_cast<std::size_t>(c_), 0.0f);
        std::vector<float> dz(static_cast<std::size_t>(in2));
        for (int i = 0; i < kGridCells; ++i) {
            const float gy = dOut.data[static_cast<std::size_t>(i)];
            const float* z = &z_[static_cast<std::size_t>(i) * in2];
            const float* h = &hid_[static_cast<std::size_t>(i) * hidden_];
            b2_.grad[0] += gy;
            std::fill(dz.begin(), dz.end(), 0.0f);
            for (int j = 0; j < hidden_; ++j) {
                w2_.grad[static_cast<std::size_t>(j)] += gy * h[j];
                if (h[j] <= 0.0f) continue;
                const float ga = gy * w2_.value[static_cast<std::size_t>(j)];
                b1_.grad[static_cast<std::size_t>(j)] += ga;
                float* gw = &w1_.grad[static_cast<std::size_t>(j) * in2];
                const float* w = &w1_.value[static_cast<std::size_t>(j) * in2];
                for (int k = 0; k < in2; ++k) {
                    gw[k] += ga * z[k];
                    dz[static_cast<std::size_t>(k)] += ga * w[k];
                }
            }
            for (int ch = 0; ch < c_; ++ch) {
                dIn.data[static_cast<std::size_t>(ch) * kGridCells + i] += dz[static_cast<std::size_t>(ch)] + dz[static_cast<std::size_t>(c_ + ch)];
                dMean[static_cast<std::size_t>(ch)] -= dz[static_cast<std::size_t>(c_ + ch)];
            }
        }
        for (int ch = 0; ch < c_; ++ch) {
            const float share = dMean[static_cast<std::size_t>(ch)] / kGridCells;
            for (int i = 0; i < kGridCells; ++i) dIn.data[static_cast<std::size_t>(ch) * kGridCells + i] += share;
        }
        return dIn;
    }

    void collect(std::vector<Param*>& out) override {
        out.push_back(&w1_);
        out.push_back(&b1_);
        out.push_back(&w2_);
        out.push_back(&b2_);
    }

private:
    int c_;
    int hidden_;
    Param w1_, b1_, w2_, b2_;
    std::vector<float> z_;
    std::vector<float> hid_;
};

int poolStages(int inputSize) {
    int stages = 0;
    int size = inputSize;
    while (size > kGridDim) {
        if (size % 2 != 0) break;
        size /= 2;
        ++stages;
    }
    if (size != kGridDim || stages == 0) {
        throw std::invalid_argument("inputSize must be 8 * 2^k with k >= 1, got " + std::to_string(inputSize));
    }
    return stages;
}

}  // namespace

std::string_view nameOf(Backbone backbone) { return backbone == Backbone::Residual ? "residual" : "small-cnn"; }

Backbone backboneFromString(std::string_view name) {
    if (name == "residual") return Backbone::Residual;
    if (name == "small-cnn") return Backbone::SmallCnn;
    throw std::invalid_argument("unknown backbone: " + std::string(name));
}

Network::Network(const NetworkShape& shape, std::uint64_t seed) : shape_(shape) {
    if (shape.denseWidth < 1) throw std::invalid_argument("denseWidth must be positive");
    Engine rng(seed);
    const int stages = poolStages(shape.inputSize);
    int channels = 3;
    if (shape.backbone == Backbone::SmallCnn) {
        for (int s = 0; s < stages; ++s) {
            const int next = std::min(8 << s, 64);
            backbone_.push_back(std::make_unique<Conv3x3>(channels, next, rng));
            backbone_.push_back(std::make_unique<Relu>());
            backbone_.push_back(std::make_unique<MaxPool2>());
            channels = next;
        }
    } else {
        backbone_.push_back(std::make_unique<Conv3x3>(channels, 16, rng));
        backbone_.push_back(std::make_unique<Relu>());
        channels = 16;
        for (int s = 0; s < stages; ++s) {
            const int next = std::min(channels * 2, 128);
            backbone_.push_back(std::make_unique<Conv3x3>(channels, next, rng));
            backbone_.push_back(std::make_unique<Relu>());
            backbone_.push_back(std::make_unique<ResidualBlock>(next, rng));
            backbone_.push_back(std::make_unique<MaxPool2>());
            channels = next;
        }
    }
    head_ = std::make_unique<CellHead>(channels, shape.denseWidth, rng);
}

Logits Network::forward(const Tensor& input) {
    if (input.c != 3 || input.h != shape_.inputSize || input.w != shape_.inputSize) {
        throw std::invalid_argument("network input must be 3 x inputSize x inputSize");
    }
    Tensor x = input;
    for (auto& layer : backbone_) x = layer->forward(x);
    const Tensor y = head_->forward(x);
    Logits logits{};
    std::copy(y.data.begin(), y.data.end(), logits.begin());
    return logits;
}

void Network::backward(const Logits& dLogits) {
    Tensor d(1, kGridDim, kGridDim);
    std::copy(dLogits.begin(), dLogits.end(), d.data.begin());
    d = head_->backward(d);
    for (auto it = backbone_.rbegin(); it != backbone_.rend(); ++it) d = (*it)->backward(d);
}

std::vector<Param*> Network::params() {
    std::vector<Param*> out;
    for (auto& layer : backbone_) layer->collect(out);
    head_->collect(out);
    return out;
}

std::size_t Network::parameterCount() {
    std::size_t n = 0;
    for (auto* p : params()) n += p->value.size();
    return n;
}

void Network::zeroGrad() {
    for (auto* p : params()) std::fill(p->grad.begin(), p->grad.end(), 0.0f);
}

std::vector<std::vector<float>> Network::snapshot() {
    std::vector<std::vector<float>> out;
    for (auto* p : params()) out.push_back(p->value);
    return out;
}

void Network::restore(const std::vector<std::vector<float>>& weights) {
    auto ps = params();
    if (ps.size() != weights.size()) throw std::invalid_argument("weight snapshot does not match the network");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i]->value.size() != weights[i].size()) throw std::invalid_argument("weight snapshot does not match the network");
        ps[i]->value = weights[i];
    }
}

namespace {
constexpr char kWeightsMagic[8] = {'O', 'L', 'A', 'B', 'W', 'T', '0', '1'};
}

void Network::writeWeights(std::ostream& out) {
    auto ps = params();
    out.write(kWeightsMagic, sizeof kWeightsMagic);
    const std::uint64_t count = ps.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (auto* p : ps) {
        const std::uint64_t n = p->value.size();
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(p->value.data()), static_cast<std::streamsize>(n * sizeof(float)));
    }
    if (!out) throw std::runtime_error("failed to write weights");
}

void Network::readWeights(std::istream& in) {
    char magic[8] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kWeightsMagic, sizeof magic) != 0) throw std::runtime_error("not a weights file");
    auto ps = params();
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || count != ps.size()) throw std::runtime_error("weights file does not match the network shape");
    for (auto* p : ps) {
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), sizeof n);
        if (!in || n != p->value.size()) throw std::runtime_error("weights file does not match the network shape");
        in.read(reinterpret_cast<char*>(p->value.data()), static_cast<std::streamsize>(n * sizeof(float)));
        if (!in) throw std::runtime_error("truncated weights file");
    }
}

void Adam::step(const std::vector<Param*>& params, float scale) {
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    const auto lr = static_cast<float>(options_.learningRate * std::sqrt(c2) / c1);
    const auto b1 = static_cast<float>(options_.beta1), b2 = static_cast<float>(options_.beta2);
    const auto eps = static_cast<float>(options_.epsilon * std::sqrt(c2));
    for (auto* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const float g = p->grad[i] * scale;
            p->m[i] = b1 * p->m[i] + (1.0f - b1) * g;
            p->v[i] = b2 * p->v[i] + (1.0f - b2) * g * g;
            p->value[i] -= lr * p->m[i] / (std::sqrt(p->v[i]) + eps);
            p->grad[i] = 0.0f;
        }
    }
}

double softmaxCrossEntropy(const Logits& logits, int target, Logits& dLogits) {
    const float mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += std::exp(static_cast<double>(logits[i] - mx));
    for (std::size_t i = 0; i < logits.size(); ++i) {
        dLogits[i] = static_cast<float>(std::exp(static_cast<double>(logits[i] - mx)) / sum);
    }
    const auto t = static_cast<std::size_t>(target);
    const double loss = -std::log(std::max(static_cast<double>(dLogits[t]), 1e-30));
    dLogits[t] -= 1.0f;
    return loss;
}

int argmax(const Logits& logits) {
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace olab::metric
