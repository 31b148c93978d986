#include "laminaplan/spunet.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "laminaplan/error.hpp"
#include "laminaplan/rng.hpp"

namespace laminaplan::nn {

void SpuNetConfig::validate() const {
    if (input.nz < 8 || input.ny < 8 || input.nx < 8 || input.nz % 8 || input.ny % 8 || input.nx % 8)
        throw Error(ErrorCode::InvalidParameter,
                    "network input dims must be positive multiples of 8 (three halvings), got (" + std::to_string(input.nz) +
                        "," + std::to_string(input.ny) + "," + std::to_string(input.nx) + ")",
                    "input");
    for (auto w : widths)
        if (w < 1) throw Error(ErrorCode::InvalidParameter, "stage widths must be >= 1", "widths");
    if (in_channels < 1 || out_channels < 1 || pyramid_channels < 1)
        throw Error(ErrorCode::InvalidParameter, "channel counts must be >= 1");
}

namespace {

constexpr int kStages = 4;

std::string stage(const char* prefix, int s) { return prefix + std::to_string(s); }

void add_conv(std::vector<ParamSpec>& specs, const std::string& name, std::int64_t out, std::int64_t in, std::int64_t k) {
    const auto u = [](std::int64_t v) { return static_cast<std::uint32_t>(v); };
    specs.push_back({name + ".weight", {u(out), u(in), u(k), u(k), u(k)}});
    specs.push_back({name + ".bias", {u(out)}});
}

void add_bn(std::vector<ParamSpec>& specs, const std::string& name, std::int64_t c) {
    for (const char* field : {".scale", ".shift", ".mean", ".var"})
        specs.push_back({name + field, {static_cast<std::uint32_t>(c)}});
}

} // namespace

std::vector<ParamSpec> architecture_manifest(const SpuNetConfig& config) {
    config.validate();
    const auto& w = config.widths;
    const std::int64_t P = config.pyramid_channels;
    std::vector<ParamSpec> specs;

    for (int s = 0; s < kStages; ++s) {
        const std::int64_t in = s == 0 ? config.in_channels : w[static_cast<std::size_t>(s - 1)];
        const std::int64_t width = w[static_cast<std::size_t>(s)];
        if (s > 0) {
            const std::string down = stage("down", s - 1);
            add_conv(specs, down + ".reduce", in, 8 * in, 1);
            add_bn(specs, down + ".bn", in);
        }
        const std::string enc = stage("enc", s);
        add_conv(specs, enc + ".conv1", width, in, 3);
        add_bn(specs, enc + ".bn1", width);
        add_conv(specs, enc + ".conv2", width, width, 3);
        add_bn(specs, enc + ".bn2", width);
    }
    for (int s = kStages - 2; s >= 0; --s) {
        const std::int64_t coarse = w[static_cast<std::size_t>(s + 1)];
        const std::int64_t width = w[static_cast<std::size_t>(s)];
        add_conv(specs, stage("up", s) + ".expand", 8 * coarse, coarse, 1);
        const std::string dec = stage("dec", s);
        add_conv(specs, dec + ".conv1", width, coarse + width, 3);
        add_bn(specs, dec + ".bn1", width);
        add_conv(specs, dec + ".conv2", width, width, 3);
        add_bn(specs, dec + ".bn2", width);
    }
    for (int level = kStages - 1; level >= 0; --level) {
        const std::int64_t factor = std::int64_t{1} << level;
        const std::string spu = stage("spu", level);
        add_conv(specs, spu + ".compress", P, w[static_cast<std::size_t>(level)], 1);
        add_conv(specs, spu + ".expand", P * factor * factor * factor, P, 1);
    }
    add_conv(specs, "out.conv", config.out_channels, P * kStages, 3);
    return specs;
}

std::string format_manifest(const SpuNetConfig& config) {
    std::ostringstream os;
    os << "# input (" << config.input.nz << "," << config.input.ny << "," << config.input.nx << ") widths";
    for (auto w : config.widths) os << ' ' << w;
    os << " pyramid " << config.pyramid_channels << " out " << config.out_channels << '\n';
    std::uint64_t total = 0;
    for (const auto& param : architecture_manifest(config)) {
        std::uint64_t n = 1;
        os << param.name << " [";
        for (std::size_t i = 0; i < param.shape.size(); ++i) {
            os << (i ? "," : "") << param.shape[i];
            n *= param.shape[i];
        }
        os << "]\n";
        total += n;
    }
    os << "# parameters " << total << '\n';
    return os.str();
}

WeightStore::WeightStore(std::vector<WeightRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        std::uint64_t n = 1;
        for (auto d : r.shape) n *= d;
        if (n != r.values.size())
            throw Error(ErrorCode::LoadError, "record payload does not match its shape", r.name);
        if (!index_.emplace(r.name, i).second) throw Error(ErrorCode::LoadError, "duplicate weight record", r.name);
    }
}

const WeightRecord& WeightStore::get(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCode::LoadError, "missing weight record", name);
    return records_[it->second];
}

void WeightStore::validate(const SpuNetConfig& config) const {
    const auto specs = architecture_manifest(config);
    std::set<std::string> expected;
    for (const auto& param : specs) {
        expected.insert(param.name);
        const WeightRecord& r = get(param.name);
        if (r.shape != param.shape) {
            std::string want, got;
            for (auto d : param.shape) want += (want.empty() ? "" : ",") + std::to_string(d);
            for (auto d : r.shape) got += (got.empty() ? "" : ",") + std::to_string(d);
            throw Error(ErrorCode::LoadError, "weight shape [" + got + "] does not match manifest [" + want + "]", param.name);
        }
    }
    for (const auto& r : records_)
        if (!expected.count(r.name)) throw Error(ErrorCode::LoadError, "unexpected weight record not in manifest", r.name);
}

io::Bytes save_weights(const WeightStore& store) {
    io::ByteWriter w;
    w.magic("SPUW");
    w.u8(0x01);
    w.u32(static_cast<std::uint32_t>(store.records().size()));
    for (const auto& r : store.records()) {
        w.u16(static_cast<std::uint16_t>(r.name.size()));
        w.magic(r.name);
        w.u8(static_cast<std::uint8_t>(r.shape.size()));
        for (auto d : r.shape) w.u32(d);
        for (float v : r.values) w.f32(v);
    }
    return w.take();
}

WeightStore parse_weights(std::span<const std::uint8_t> bytes) {
    io::ByteReader r(bytes, "SPUW");
    r.expect_magic("SPUW");
    const std::uint32_t count = r.u32();
    std::vector<WeightRecord> records;
    for (std::uint32_t i = 0; i < count; ++i) {
        WeightRecord rec;
        const std::uint16_t len = r.u16();
        rec.name = r.string(len);
        const std::uint8_t rank = r.u8();
        std::uint64_t n = 1;
        for (std::uint8_t d = 0; d < rank; ++d) {
            rec.shape.push_back(r.u32());
            n *= rec.shape.back();
        }
        if (n * 4 > r.remaining())
            throw Error(ErrorCode::LoadError, "SPUW: truncated payload", rec.name);
        rec.values.resize(static_cast<std::size_t>(n));
        r.f32_array(rec.values);
        records.push_back(std::move(rec));
    }
    r.expect_end();
    return WeightStore(std::move(records));
}

WeightStore load_weights(std::span<const std::uint8_t> bytes, const SpuNetConfig& config) {
    WeightStore store = parse_weights(bytes);
    store.validate(config);
    return store;
}

WeightStore random_weights(const SpuNetConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WeightRecord> records;
    for (const auto& param : architecture_manifest(config)) {
        WeightRecord r{param.name, param.shape, {}};
        std::uint64_t n = 1;
        for (auto d : param.shape) n *= d;
        r.values.resize(static_cast<std::size_t>(n));
        const auto ends_with = [&](const char* suffix) {
            const std::string s(suffix);
            return param.name.size() >= s.size() && param.name.compare(param.name.size() - s.size(), s.size(), s) == 0;
        };
        if (ends_with(".weight")) {
            const double fan_in = static_cast<double>(n / param.shape[0]);
            const bool before_relu = param.name.rfind("enc", 0) == 0 || param.name.rfind("dec", 0) == 0;
            const double stddev = std::sqrt((before_relu ? 2.0 : 1.0) / fan_in);
            for (float& v : r.values) v = static_cast<float>(rng.normal(0.0, stddev));
        } else if (ends_with(".bias")) {
            for (float& v : r.values) v = static_cast<float>(rng.normal(0.0, 0.01));
        } else if (ends_with(".scale")) {
            for (float& v : r.values) v = static_cast<float>(rng.uniform(0.9, 1.1));
        } else if (ends_with(".var")) {
            for (float& v : r.values) v = static_cast<float>(rng.uniform(0.8, 1.2));
        } else {
            for (float& v : r.values) v = static_cast<float>(rng.normal(0.0, 0.05));
        }
        records.push_back(std::move(r));
    }
    return WeightStore(std::move(records));
}

WeightStore constant_weights(const SpuNetConfig& config, float bias) {
    std::vector<WeightRecord> records;
    for (const auto& param : architecture_manifest(config)) {
        WeightRecord r{param.name, param.shape, {}};
        std::uint64_t n = 1;
        for (auto d : param.shape) n *= d;
        float fill = 0.0f;
        if (param.name.ends_with(".bias")) fill = bias;
        if (param.name.ends_with(".scale") || param.name.ends_with(".var")) fill = 1.0f;
        r.values.assign(static_cast<std::size_t>(n), fill);
        records.push_back(std::move(r));
    }
    return WeightStore(std::move(records));
}

namespace {

class Runner {
public:
    Runner(const WeightStore& w, const SpuNetConfig& c, const ForwardOptions& o) : weights_(w), config_(c), options_(o) {}

    ConvParams conv(const std::string& name) const {
        const WeightRecord& wr = weights_.get(name + ".weight");
        const WeightRecord& br = weights_.get(name + ".bias");
        ConvParams p;
        p.out_channels = wr.shape.at(0);
        p.in_channels = wr.shape.at(1);
        p.kernel = wr.shape.at(2);
        p.weight = wr.values;
        p.bias = br.values;
        return p;
    }

    BatchNormParams bn(const std::string& name) const {
        BatchNormParams p;
        p.scale = weights_.get(name + ".scale").values;
        p.shift = weights_.get(name + ".shift").values;
        p.mean = weights_.get(name + ".mean").values;
        p.var = weights_.get(name + ".var").values;
        p.eps = config_.bn_eps;
        return p;
    }

    static void check_finite(const Tensor5& t, const std::string& layer) {
        for (float v : t.data)
            if (!std::isfinite(v)) throw Error(ErrorCode::NumericError, "non-finite activation", layer);
    }

    Tensor5 conv_bn_relu(const Tensor5& in, const std::string& conv_name, const std::string& bn_name) const {
        Tensor5 t = batchnorm3d(conv3d(in, conv(conv_name), options_.threads), bn(bn_name));
        relu_inplace(t);
        check_finite(t, conv_name);
        return t;
    }

    Tensor5 double_block(const Tensor5& in, const std::string& prefix) const {
        return conv_bn_relu(conv_bn_relu(in, prefix + ".conv1", prefix + ".bn1"), prefix + ".conv2", prefix + ".bn2");
    }

    Tensor5 merge(const Tensor5& in, const std::string& prefix) const {
        Tensor5 t = patch_merge3d(in, conv(prefix + ".reduce"), bn(prefix + ".bn"), options_.threads);
        check_finite(t, prefix);
        return t;
    }

    Tensor5 expand(const Tensor5& in, std::int64_t factor, const std::string& name) const {
        Tensor5 t = patch_expand3d(in, factor, conv(name), options_.threads);
        check_finite(t, name);
        return t;
    }

    Tensor5 plain_conv(const Tensor5& in, const std::string& name) const {
        Tensor5 t = conv3d(in, conv(name), options_.threads);
        check_finite(t, name);
        return t;
    }

    Tensor5 run(const Tensor5& input) const {
        std::array<Tensor5, kStages> skips;
        skips[0] = double_block(input, "enc0");
        for (int s = 1; s < kStages; ++s)
            skips[static_cast<std::size_t>(s)] = double_block(merge(skips[static_cast<std::size_t>(s - 1)], stage("down", s - 1)), stage("enc", s));

        // decoded[level] is the decoder feature at resolution 2^-level; the bottleneck counts as level 3.
        std::array<Tensor5, kStages> decoded;
        decoded[kStages - 1] = std::move(skips[kStages - 1]);
        for (int s = kStages - 2; s >= 0; --s) {
            const auto i = static_cast<std::size_t>(s);
            Tensor5 up = expand(decoded[i + 1], 2, stage("up", s) + ".expand");
            const Tensor5* parts[] = {&up, &skips[i]};
            Tensor5 joined = concat_channels(parts);
            up = {};
            skips[i] = {};
            decoded[i] = double_block(joined, stage("dec", s));
        }

        std::array<Tensor5, kStages> pyramid;
        for (int level = kStages - 1; level >= 0; --level) {
            const auto i = static_cast<std::size_t>(level);
            const std::string spu = stage("spu", level);
            Tensor5 compressed = plain_conv(decoded[i], spu + ".compress");
            decoded[i] = {};
            pyramid[static_cast<std::size_t>(kStages - 1 - level)] = expand(compressed, std::int64_t{1} << level, spu + ".expand");
        }
        const Tensor5* parts[] = {&pyramid[0], &pyramid[1], &pyramid[2], &pyramid[3]};
        Tensor5 fused = concat_channels(parts);
        pyramid = {};
        return plain_conv(fused, "out.conv");
    }

private:
    const WeightStore& weights_;
    const SpuNetConfig& config_;
    const ForwardOptions& options_;
};

} // namespace

Tensor5 forward_tensor(const Tensor5& input, const WeightStore& weights, const SpuNetConfig& config,
                       const ForwardOptions& options) {
    config.validate();
    if (input.channels() != config.in_channels || input.depth() != config.input.nz ||
        input.height() != config.input.ny || input.width() != config.input.nx)
        throw Error(ErrorCode::ShapeMismatch, "network input " + shape_string(input.shape) + " does not match configured (B," +
                                                  std::to_string(config.in_channels) + "," + std::to_string(config.input.nz) +
                                                  "," + std::to_string(config.input.ny) + "," +
                                                  std::to_string(config.input.nx) + ")");
    weights.validate(config);
    Runner::check_finite(input, "input");
    return Runner(weights, config, options).run(input);
}

HeatmapStack forward(const Volume& vol, const WeightStore& weights, const SpuNetConfig& config,
                     const ForwardOptions& options) {
    if (config.in_channels != 1) throw Error(ErrorCode::InvalidParameter, "volume inference needs a single input channel");
    const Dims3& d = vol.dims();
    Tensor5 input(1, 1, d.nz, d.ny, d.nx);
    input.data = vol.voxels();
    const Tensor5 out = forward_tensor(input, weights, config, options);

    HeatmapStack h;
    h.dims = d;
    for (std::int64_t c = 0; c < out.channels(); ++c)
        h.names.push_back(c < static_cast<std::int64_t>(kLandmarkCount) ? std::string(kLandmarkNames[static_cast<std::size_t>(c)])
                                                                          : "ch" + std::to_string(c));
    h.values.assign(out.data.begin(), out.data.end());
    return h;
}

} // namespace laminaplan::nn
