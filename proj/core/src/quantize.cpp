// SPDX-License-Identifier: Apache-2.0
#include "sardet/quantize.hpp"

#include <algorithm>
#include <cmath>

#include "sardet/binio.hpp"

namespace sardet {

QuantParams QuantParams::asymmetric_relu(float hi) {
  QuantParams p;
  p.scale = std::max(hi / 255.0f, kMinScale);
  p.zero_point = -128;
  return p;
}

QuantParams QuantParams::symmetric(float lo, float hi) {
  float absmax = std::max(std::abs(lo), std::abs(hi));
  QuantParams p;
  p.scale = std::max(2.0f * absmax / 255.0f, kMinScale);
  p.zero_point = 0;
  return p;
}

std::int8_t QuantParams::quantize(float v) const {
  std::int32_t q = round_half_away(static_cast<double>(v) / scale) + zero_point;
  return static_cast<std::int8_t>(std::clamp(q, -128, 127));
}

const ActRange& Calibration::find(const std::string& name) const {
  for (const auto& r : ranges)
    if (r.name == name) return r;
  throw internal_error("calibration: no range recorded for " + name);
}

std::int32_t round_half_away(double v) {
  return static_cast<std::int32_t>(v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}

FixedMul FixedMul::from_double(double value) {
  if (!(value > 0.0)) throw param_error("FixedMul: factor must be > 0");
  int exp = 0;
  double mant = std::frexp(value, &exp);  // mant in [0.5, 1)
  auto m64 = static_cast<std::int64_t>(std::llround(mant * (1ll << 31)));
  if (m64 == (1ll << 31)) {
    m64 /= 2;
    ++exp;
  }
  FixedMul f;
  f.m = static_cast<std::int32_t>(m64);
  f.shift = -exp;  // value = m * 2^-(31+shift)
  return f;
}

std::int32_t FixedMul::apply(std::int64_t acc) const {
  std::int64_t prod = acc * static_cast<std::int64_t>(m);
  int total = 31 + shift;
  if (total <= 0) {
    std::int64_t r = prod << (-total);
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(r, INT32_MIN, INT32_MAX));
  }
  std::int64_t offset = 1ll << (total - 1);
  std::int64_t r = prod >= 0 ? (prod + offset) >> total : -((-prod + offset) >> total);
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(r, INT32_MIN, INT32_MAX));
}

namespace {

// Folds BN (gamma, beta, running stats) into conv weight/bias.
void fold_into(Conv2d& dst, const Conv2d& src, const BatchNorm2d& bn) {
  const int out_c = src.out_channels();
  const std::int64_t per_out = static_cast<std::int64_t>(src.in_channels()) * src.kernel() * src.kernel();
  for (int o = 0; o < out_c; ++o) {
    double inv = 1.0 / std::sqrt(static_cast<double>(bn.running_var.data[o]) + BatchNorm2d::kEps);
    double g = bn.gamma.data[o] * inv;
    for (std::int64_t i = 0; i < per_out; ++i)
      dst.weight.data[o * per_out + i] = static_cast<float>(src.weight.data[o * per_out + i] * g);
    dst.bias->data[o] =
        static_cast<float>(bn.beta.data[o] - bn.running_mean.data[o] * g);
  }
}

}  // namespace

FoldedModel::FoldedModel(Model& model)
    : stem("folded.stem", Model::kInputChannels, model.config().stem_channels, 7, 2, true),
      head("folded.head", model.config().channels[3], model.config().head_channels(), 1, 1, true),
      config(model.config()),
      meta(model.meta) {
  if (!model.bn_stats_ready())
    throw state_error("fold: model has no recorded BN statistics; train or load a checkpoint first");
  fold_into(stem, model.stem_conv, model.stem_bn);
  int block_index = 0;
  for (size_t layer = 0; layer < model.layers.size(); ++layer) {
    for (auto& b : model.layers[layer]) {
      Block fb{
          Conv2d("folded.b" + std::to_string(block_index) + ".conv1", b.conv1.in_channels(),
                 b.conv1.out_channels(), 3, b.conv1.stride(), true),
          Conv2d("folded.b" + std::to_string(block_index) + ".conv2", b.conv2.in_channels(),
                 b.conv2.out_channels(), 3, 1, true),
          std::nullopt,
          b.conv1.stride(),
          "layer" + std::to_string(layer + 1) + ".block" +
              std::to_string(&b - model.layers[layer].data()),
      };
      fold_into(fb.conv1, b.conv1, b.bn1);
      fold_into(fb.conv2, b.conv2, b.bn2);
      if (b.proj) {
        fb.proj.emplace("folded.b" + std::to_string(block_index) + ".proj", b.proj->in_channels(),
                        b.proj->out_channels(), 1, b.proj->stride(), true);
        fold_into(*fb.proj, *b.proj, *b.proj_bn);
      }
      blocks.push_back(std::move(fb));
      ++block_index;
    }
  }
  // Head carries its own bias already; copy as-is.
  head.weight.data = model.head.weight.data;
  head.bias->data = model.head.bias->data;
}

Tensor4 FoldedModel::forward(const Tensor4& batch) {
  return forward_collect(batch, nullptr);
}

Tensor4 FoldedModel::forward_collect(const Tensor4& batch, const Collector& collect) {
  if (collect) collect("input", batch);
  Tensor4 x = relu_.forward(stem.forward(batch, Mode::eval), Mode::eval);
  if (collect) collect("stem", x);
  x = pool.forward(x, Mode::eval);
  for (auto& b : blocks) {
    Tensor4 main = relu_.forward(b.conv1.forward(x, Mode::eval), Mode::eval);
    if (collect) collect(b.name + ".mid", main);
    main = b.conv2.forward(main, Mode::eval);
    Tensor4 shortcut = b.proj ? b.proj->forward(x, Mode::eval) : x;
    if (collect && b.proj) collect(b.name + ".proj", shortcut);
    for (std::int64_t i = 0; i < main.size(); ++i) {
      float v = main.data[i] + shortcut.data[i];
      main.data[i] = v > 0.0f ? v : 0.0f;
    }
    if (collect) collect(b.name + ".out", main);
    x = std::move(main);
  }
  return head.forward(x, Mode::eval);
}

Calibration calibrate(FoldedModel& folded, const std::vector<Tensor4>& calibration_batches) {
  if (calibration_batches.empty())
    throw param_error("calibrate: at least one calibration batch required");
  Calibration cal;
  auto absorb = [&](const std::string& name, const Tensor4& t) {
    float lo = t.data[0], hi = t.data[0];
    for (float v : t.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (auto& r : cal.ranges) {
      if (r.name == name) {
        r.lo = std::min(r.lo, lo);
        r.hi = std::max(r.hi, hi);
        return;
      }
    }
    cal.ranges.push_back({name, lo, hi});
  };
  for (const auto& batch : calibration_batches) folded.forward_collect(batch, absorb);
  for (const auto& r : cal.ranges) {
    if (r.hi - r.lo < 1e-12f && std::abs(r.hi) < 1e-12f)
      cal.warnings.push_back("degenerate activation range at " + r.name +
                             ", clamping scale to 1e-8");
  }
  return cal;
}

namespace {

QConvLayer quantize_conv(const Conv2d& conv, const std::string& name) {
  QConvLayer q;
  q.name = name;
  q.in_c = conv.in_channels();
  q.out_c = conv.out_channels();
  q.kernel = conv.kernel();
  q.stride = conv.stride();
  const std::int64_t per_out = static_cast<std::int64_t>(q.in_c) * q.kernel * q.kernel;
  q.weight.resize(static_cast<size_t>(q.out_c) * per_out);
  q.wscale.resize(q.out_c);
  q.bias.assign(conv.bias->data.begin(), conv.bias->data.end());
  for (int o = 0; o < q.out_c; ++o) {
    float absmax = 0.0f;
    for (std::int64_t i = 0; i < per_out; ++i)
      absmax = std::max(absmax, std::abs(conv.weight.data[o * per_out + i]));
    float scale = std::max(absmax / 127.0f, QuantParams::kMinScale);
    q.wscale[o] = scale;
    for (std::int64_t i = 0; i < per_out; ++i) {
      std::int32_t v = round_half_away(conv.weight.data[o * per_out + i] / scale);
      q.weight[o * per_out + i] = static_cast<std::int8_t>(std::clamp(v, -127, 127));
    }
  }
  return q;
}

void derive_requant(QConvLayer& q, const QuantParams& in, const QuantParams* out) {
  const std::int64_t per_out = static_cast<std::int64_t>(q.in_c) * q.kernel * q.kernel;
  q.wsum.resize(q.out_c);
  q.bias_int.resize(q.out_c);
  q.requant.clear();
  q.requant.reserve(q.out_c);
  for (int o = 0; o < q.out_c; ++o) {
    std::int32_t s = 0;
    for (std::int64_t i = 0; i < per_out; ++i) s += q.weight[o * per_out + i];
    q.wsum[o] = s;
    double acc_scale = static_cast<double>(in.scale) * q.wscale[o];
    q.bias_int[o] = round_half_away(q.bias[o] / acc_scale);
    if (out) q.requant.push_back(FixedMul::from_double(acc_scale / out->scale));
  }
}

}  // namespace

QuantizedModel::QuantizedModel(FoldedModel& folded, const Calibration& cal) {
  config = folded.config;
  meta = folded.meta;
  const auto& in_range = cal.find("input");
  q_input = QuantParams::symmetric(in_range.lo, in_range.hi);
  q_stem = QuantParams::asymmetric_relu(cal.find("stem").hi);
  stem = quantize_conv(folded.stem, "stem");
  QuantParams q_prev = q_stem;
  for (const auto& b : folded.blocks) {
    QBlock qb;
    qb.conv1 = quantize_conv(b.conv1, b.name + ".conv1");
    qb.conv2 = quantize_conv(b.conv2, b.name + ".conv2");
    qb.q_mid = QuantParams::asymmetric_relu(cal.find(b.name + ".mid").hi);
    qb.q_out = QuantParams::asymmetric_relu(cal.find(b.name + ".out").hi);
    if (b.proj) {
      qb.proj = quantize_conv(*b.proj, b.name + ".proj");
      const auto& pr = cal.find(b.name + ".proj");
      qb.q_proj = QuantParams::symmetric(pr.lo, pr.hi);
    }
    blocks.push_back(std::move(qb));
    q_prev = blocks.back().q_out;
  }
  head = quantize_conv(folded.head, "head");
  q_head_in = q_prev;
  prepare();
}

void QuantizedModel::prepare() {
  derive_requant(stem, q_input, &q_stem);
  QuantParams q_prev = q_stem;
  for (auto& b : blocks) {
    derive_requant(b.conv1, q_prev, &b.q_mid);
    derive_requant(b.conv2, b.q_mid, &b.q_out);
    if (b.proj) {
      derive_requant(*b.proj, q_prev, &b.q_out);
    } else {
      b.shortcut_scale = FixedMul::from_double(static_cast<double>(q_prev.scale) / b.q_out.scale);
    }
    q_prev = b.q_out;
  }
  derive_requant(head, q_head_in, nullptr);
}

namespace {

constexpr char kMagic[4] = {'S', 'D', 'Q', '8'};
constexpr std::uint32_t kVersion = 1;

enum RecordKind : std::uint8_t { kInt8Tensor = 0, kF32Tensor = 1, kQuantParams = 2 };

void write_qparams(BinaryWriter& w, const std::string& name, const QuantParams& p) {
  w.put_string(name);
  w.put<std::uint8_t>(kQuantParams);
  w.put<float>(p.scale);
  w.put<std::int32_t>(p.zero_point);
}

void write_i8(BinaryWriter& w, const std::string& name, const std::vector<std::int8_t>& v) {
  w.put_string(name);
  w.put<std::uint8_t>(kInt8Tensor);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
  w.put_bytes(v.data(), v.size());
}

void write_f32(BinaryWriter& w, const std::string& name, const std::vector<float>& v) {
  w.put_string(name);
  w.put<std::uint8_t>(kF32Tensor);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
  w.put_bytes(v.data(), v.size() * sizeof(float));
}

void write_conv(BinaryWriter& w, const QConvLayer& q) {
  write_i8(w, q.name + ".weight", q.weight);
  write_f32(w, q.name + ".wscale", q.wscale);
  write_f32(w, q.name + ".bias", q.bias);
}

struct RecordReader {
  BinaryReader& r;

  void expect(const std::string& name, RecordKind kind) {
    std::string got = r.get_string();
    if (got != name) r.fail("record '" + got + "' where '" + name + "' expected");
    auto k = r.get<std::uint8_t>();
    if (k != kind) r.fail("record " + name + ": wrong kind");
  }
  QuantParams qparams(const std::string& name) {
    expect(name, kQuantParams);
    QuantParams p;
    p.scale = r.get<float>();
    p.zero_point = r.get<std::int32_t>();
    return p;
  }
  std::vector<std::int8_t> i8(const std::string& name, size_t expected) {
    expect(name, kInt8Tensor);
    auto n = r.get<std::uint32_t>();
    if (n != expected)
      r.fail("record " + name + ": " + std::to_string(n) + " values, expected " +
             std::to_string(expected));
    std::vector<std::int8_t> v(n);
    r.get_bytes(v.data(), n);
    return v;
  }
  std::vector<float> f32(const std::string& name, size_t expected) {
    expect(name, kF32Tensor);
    auto n = r.get<std::uint32_t>();
    if (n != expected)
      r.fail("record " + name + ": " + std::to_string(n) + " values, expected " +
             std::to_string(expected));
    std::vector<float> v(n);
    r.get_bytes(v.data(), n * sizeof(float));
    return v;
  }
};

void read_conv(RecordReader& rr, QConvLayer& q) {
  const size_t per_out = static_cast<size_t>(q.in_c) * q.kernel * q.kernel;
  q.weight = rr.i8(q.name + ".weight", per_out * q.out_c);
  q.wscale = rr.f32(q.name + ".wscale", q.out_c);
  q.bias = rr.f32(q.name + ".bias", q.out_c);
}

}  // namespace

void QuantizedModel::save(const std::string& path) const {
  BinaryWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(config.size_tag));
  for (int b : config.blocks) w.put<std::uint32_t>(static_cast<std::uint32_t>(b));
  for (int c : config.channels) w.put<std::uint32_t>(static_cast<std::uint32_t>(c));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config.n_classes));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config.crop));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config.stem_channels));
  w.put<std::uint32_t>(meta.epochs);
  w.put<std::uint64_t>(meta.seed);
  w.put<float>(meta.threshold);

  write_qparams(w, "q_input", q_input);
  write_qparams(w, "q_stem", q_stem);
  write_conv(w, stem);
  for (const auto& b : blocks) {
    write_conv(w, b.conv1);
    write_conv(w, b.conv2);
    write_qparams(w, b.conv1.name + ".q_mid", b.q_mid);
    write_qparams(w, b.conv1.name + ".q_out", b.q_out);
    if (b.proj) {
      write_conv(w, *b.proj);
      write_qparams(w, b.proj->name + ".q_proj", b.q_proj);
    }
  }
  write_conv(w, head);
  w.write_file(path);
}

QuantizedModel QuantizedModel::load(const std::string& path) {
  BinaryReader r = BinaryReader::from_file(path);
  r.expect_magic(kMagic);
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));

  QuantizedModel q;
  q.config.size_tag = static_cast<char>(r.get<std::uint8_t>());
  for (int& b : q.config.blocks) b = static_cast<int>(r.get<std::uint32_t>());
  for (int& c : q.config.channels) c = static_cast<int>(r.get<std::uint32_t>());
  q.config.n_classes = static_cast<int>(r.get<std::uint32_t>());
  q.config.crop = static_cast<int>(r.get<std::uint32_t>());
  q.config.stem_channels = static_cast<int>(r.get<std::uint32_t>());
  q.config.validate();
  q.meta.epochs = r.get<std::uint32_t>();
  q.meta.seed = r.get<std::uint64_t>();
  q.meta.threshold = r.get<float>();

  RecordReader rr{r};
  q.q_input = rr.qparams("q_input");
  q.q_stem = rr.qparams("q_stem");

  q.stem.name = "stem";
  q.stem.in_c = Model::kInputChannels;
  q.stem.out_c = q.config.stem_channels;
  q.stem.kernel = 7;
  q.stem.stride = 2;
  read_conv(rr, q.stem);

  static const int kLayerStride[4] = {1, 2, 2, 2};
  int in_c = q.config.stem_channels;
  for (int layer = 0; layer < 4; ++layer) {
    for (int bi = 0; bi < q.config.blocks[layer]; ++bi) {
      int stride = bi == 0 ? kLayerStride[layer] : 1;
      int cin = bi == 0 ? in_c : q.config.channels[layer];
      int cout = q.config.channels[layer];
      QBlock qb;
      std::string bname =
          "layer" + std::to_string(layer + 1) + ".block" + std::to_string(bi);
      qb.conv1 = {bname + ".conv1", cin, cout, 3, stride, {}, {}, {}, {}, {}, {}};
      qb.conv2 = {bname + ".conv2", cout, cout, 3, 1, {}, {}, {}, {}, {}, {}};
      read_conv(rr, qb.conv1);
      read_conv(rr, qb.conv2);
      qb.q_mid = rr.qparams(qb.conv1.name + ".q_mid");
      qb.q_out = rr.qparams(qb.conv1.name + ".q_out");
      if (stride != 1 || cin != cout) {
        qb.proj = QConvLayer{bname + ".proj", cin, cout, 1, stride, {}, {}, {}, {}, {}, {}};
        read_conv(rr, *qb.proj);
        qb.q_proj = rr.qparams(qb.proj->name + ".q_proj");
      }
      q.blocks.push_back(std::move(qb));
    }
    in_c = q.config.channels[layer];
  }
  q.head = {"head", q.config.channels[3], q.config.head_channels(), 1, 1, {}, {}, {}, {}, {}, {}};
  read_conv(rr, q.head);
  if (r.remaining() != 0) r.fail("trailing bytes after last record");
  q.prepare();
  return q;
}

}  // namespace sardet
