#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "olab/core/model.hpp"
#include "olab/core/random.hpp"

namespace olab::metric {

/// Channel-major float feature map.
struct Tensor {
    int c = 0;
    int h = 0;
    int w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int channels, int height, int width) : c(channels), h(height), w(width), data(static_cast<std::size_t>(channels) * height * width, 0.0f) {}

    float& at(int ch, int y, int x) { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
    float at(int ch, int y, int x) const { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
};

/// Trainable parameter block with its gradient and Adam moments.
struct Param {
    std::vector<float> value;
    std::vector<float> grad;
    std::vector<float> m;
    std::vector<float> v;

    explicit Param(std::size_t n = 0) : value(n, 0.0f), grad(n, 0.0f), m(n, 0.0f), v(n, 0.0f) {}
};

class Layer {
public:
    virtual ~Layer() = default;
    /// Caches what backward needs; one sample at a time.
    virtual Tensor forward(const Tensor& in) = 0;
    /// Accumulates parameter gradients and returns the input gradient.
    virtual Tensor backward(const Tensor& dOut) = 0;
    virtual void collect(std::vector<Param*>& out) { (void)out; }
};

enum class Backbone { Residual, SmallCnn };
std::string_view nameOf(Backbone backbone);
Backbone backboneFromString(std::string_view name);

struct NetworkShape {
    Backbone backbone = Backbone::SmallCnn;
    int inputSize = 64;   ///< 8 * 2^k
    int denseWidth = 64;  ///< hidden width of the per-cell head
};

using Logits = std::array<float, kGridCells>;

/// Position classifier: a convolutional backbone reduces the image to one
/// feature vector per grid cell; a dense head shared by all cells scores each
/// cell from its features and their difference to the grid-wide mean.
class Network {
public:
    Network(const NetworkShape& shape, std::uint64_t seed);
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    const NetworkShape& shape() const { return shape_; }

    Logits forward(const Tensor& input);
    void backward(const Logits& dLogits);

    std::vector<Param*> params();
    std::size_t parameterCount();
    void zeroGrad();

    std::vector<std::vector<float>> snapshot();
    void restore(const std::vector<std::vector<float>>& weights);

    /// Binary weights (native float layout), with a shape check on read.
    void writeWeights(std::ostream& out);
    void readWeights(std::istream& in);

private:
    NetworkShape shape_;
    std::vector<std::unique_ptr<Layer>> backbone_;
    std::unique_ptr<Layer> head_;
};

/// Adam with the usual defaults.
struct AdamOptions {
    double learningRate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

class Adam {
public:
    explicit Adam(AdamOptions options = {}) : options_(options) {}
    /// Applies grad * scale and clears the gradients.
    void step(const std::vector<Param*>& params, float scale);

private:
    AdamOptions options_;
    long t_ = 0;
};

/// Softmax cross-entropy; writes the logit gradient and returns the loss.
double softmaxCrossEntropy(const Logits& logits, int target, Logits& dLogits);
int argmax(const Logits& logits);

/// Standard normal draw from the portable engine helpers.
double standardNormal(Engine& rng);

}  // namespace olab::metric
