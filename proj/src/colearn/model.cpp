#include "colearn/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "colearn/rng.hpp"

namespace colearn::model {

void NetworkConfig::validate() const {
    if (input_dim == 0 || num_classes == 0)
        throw ParameterError("network config: input_dim and num_classes must be set");
    if (encoder_widths.empty())
        throw ParameterError("network config: encoder needs at least one hidden layer");
    for (std::size_t w : encoder_widths)
        if (w == 0) throw ParameterError("network config: zero-width layer");
    if (projection_dim == 0) throw ParameterError("network config: zero projection dim");
}

std::size_t NetworkConfig::parameter_count() const {
    std::size_t count = 0;
    std::size_t in = input_dim;
    for (std::size_t w : encoder_widths) {
        count += in * w + w;
        in = w;
    }
    count += in * num_classes + num_classes;               // classifier
    count += in * projection_dim + projection_dim;         // projection hidden
    count += projection_dim * projection_dim + projection_dim;  // projection output
    return count;
}

namespace {

ad::Tensor init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(fan_in * fan_out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    return ad::Tensor::leaf({fan_in, fan_out}, std::move(w), true);
}

ad::Tensor init_bias(std::size_t n) { return ad::Tensor::zeros({n}, true); }

}  // namespace

ModelParams init_params(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(hash_tag(seed, "init"));
    ModelParams p;
    p.config = cfg;
    std::size_t in = cfg.input_dim;
    for (std::size_t w : cfg.encoder_widths) {
        p.encoder_weights.push_back(init_weight(in, w, rng));
        p.encoder_biases.push_back(init_bias(w));
        in = w;
    }
    p.classifier_weight = init_weight(in, cfg.num_classes, rng);
    p.classifier_bias = init_bias(cfg.num_classes);
    p.projection_weight1 = init_weight(in, cfg.projection_dim, rng);
    p.projection_bias1 = init_bias(cfg.projection_dim);
    p.projection_weight2 = init_weight(cfg.projection_dim, cfg.projection_dim, rng);
    p.projection_bias2 = init_bias(cfg.projection_dim);
    if (p.parameter_count() != cfg.parameter_count())
        throw TrainingError("parameter count mismatch against closed form");
    return p;
}

std::vector<ModelParams::Named> ModelParams::all() const {
    std::vector<Named> out;
    for (std::size_t i = 0; i < encoder_weights.size(); ++i) {
        out.push_back({"encoder." + std::to_string(i) + ".weight", encoder_weights[i]});
        out.push_back({"encoder." + std::to_string(i) + ".bias", encoder_biases[i]});
    }
    out.push_back({"classifier.weight", classifier_weight});
    out.push_back({"classifier.bias", classifier_bias});
    out.push_back({"projection.0.weight", projection_weight1});
    out.push_back({"projection.0.bias", projection_bias1});
    out.push_back({"projection.1.weight", projection_weight2});
    out.push_back({"projection.1.bias", projection_bias2});
    return out;
}

void ModelParams::zero_grad() {
    for (auto& named : all()) named.tensor.zero_grad();
}

std::size_t ModelParams::parameter_count() const {
    std::size_t count = 0;
    for (const auto& named : all()) count += named.tensor.size();
    return count;
}

ad::Tensor encode(ad::Tape& tape, const ad::Tensor& x, const ModelParams& params) {
    if (x.cols() != params.config.input_dim)
        throw DimensionError("encode: input width does not match config");
    ad::Tensor h = x;
    for (std::size_t i = 0; i < params.encoder_weights.size(); ++i) {
        h = tape.relu(tape.add_rowvec(tape.matmul(h, params.encoder_weights[i]),
                                      params.encoder_biases[i]));
    }
    return h;
}

ad::Tensor classify_logits(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params) {
    if (u.cols() != params.config.representation_dim())
        throw DimensionError("classify: representation width mismatch");
    return tape.add_rowvec(tape.matmul(u, params.classifier_weight), params.classifier_bias);
}

ad::Tensor classify(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params) {
    return tape.exp(tape.log_softmax_rows(classify_logits(tape, u, params)));
}

ad::Tensor project(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params) {
    if (u.cols() != params.config.representation_dim())
        throw DimensionError("project: representation width mismatch");
    ad::Tensor h = tape.relu(
        tape.add_rowvec(tape.matmul(u, params.projection_weight1), params.projection_bias1));
    return tape.add_rowvec(tape.matmul(h, params.projection_weight2), params.projection_bias2);
}

ViewOutputs forward_views(ad::Tape& tape, const BatchViews& views, const ModelParams& params) {
    if (!views.has_strong())
        throw ParameterError("forward_views: all three views must be present");
    ViewOutputs out;
    const std::size_t b = views.batch, d = views.input_dim;
    ad::Tensor x1 = ad::Tensor::leaf({b, d}, views.weak);
    ad::Tensor x2 = ad::Tensor::leaf({b, d}, views.strong1);
    ad::Tensor x3 = ad::Tensor::leaf({b, d}, views.strong2);
    out.predictions = classify(tape, encode(tape, x1, params), params);
    out.projection2 = project(tape, encode(tape, x2, params), params);
    out.projection3 = project(tape, encode(tape, x3, params), params);
    return out;
}

namespace {

constexpr char kMagic[4] = {'C', 'L', 'M', 'P'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (v >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_le<std::uint64_t>(out, bits);
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_le<std::uint64_t>(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_le<std::uint16_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.config.input_dim));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.config.num_classes));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.config.projection_dim));
    write_le<std::uint32_t>(out,
                            static_cast<std::uint32_t>(params.config.encoder_widths.size()));
    for (std::size_t w : params.config.encoder_widths)
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    for (const auto& named : params.all())
        for (double v : named.tensor.data()) write_f64(out, v);
    if (!out) throw IoError("write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic in checkpoint: " + path);
    if (read_le<std::uint16_t>(in) != kVersion)
        throw FormatError("unsupported checkpoint version");
    NetworkConfig cfg;
    cfg.input_dim = read_le<std::uint32_t>(in);
    cfg.num_classes = read_le<std::uint32_t>(in);
    cfg.projection_dim = read_le<std::uint32_t>(in);
    const auto n_layers = read_le<std::uint32_t>(in);
    cfg.encoder_widths.clear();
    for (std::uint32_t i = 0; i < n_layers; ++i)
        cfg.encoder_widths.push_back(read_le<std::uint32_t>(in));
    ModelParams params = init_params(cfg, 0);
    for (auto named : params.all())
        for (auto& v : named.tensor.data()) v = read_f64(in);
    if (!in) throw FormatError("truncated checkpoint: " + path);
    return params;
}

}  // namespace colearn::model
