#include "pastegen/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "pastegen/errors.hpp"

namespace pastegen {

namespace {

// Valid-mode convolution, stencil order so the x loop vectorizes.
void conv_forward(const double* in, int in_c, int in_hw, const double* w,
                  const double* b, int out_c, int k, double* out) {
  const int out_hw = in_hw - k + 1;
  const int out_plane = out_hw * out_hw;
  for (int f = 0; f < out_c; ++f) {
    std::fill(out + f * out_plane, out + (f + 1) * out_plane, b[f]);
  }
  for (int f = 0; f < out_c; ++f) {
    for (int c = 0; c < in_c; ++c) {
      const double* wbase = w + ((f * in_c + c) * k) * k;
      const double* inp = in + c * in_hw * in_hw;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = wbase[ky * k + kx];
          for (int y = 0; y < out_hw; ++y) {
            const double* src = inp + (y + ky) * in_hw + kx;
            double* dst = out + (f * out_hw + y) * out_hw;
            for (int x = 0; x < out_hw; ++x) dst[x] += wv * src[x];
          }
        }
      }
    }
  }
}

// Gradients w.r.t. weights, biases and input for the convolution above.
void conv_backward(const double* in, int in_c, int in_hw, const double* w,
                   int out_c, int k, const double* dout, double* dw, double* db,
                   double* din) {
  const int out_hw = in_hw - k + 1;
  const int out_plane = out_hw * out_hw;
  for (int f = 0; f < out_c; ++f) {
    double acc = 0.0;
    const double* d = dout + f * out_plane;
    for (int i = 0; i < out_plane; ++i) acc += d[i];
    db[f] += acc;
  }
  for (int f = 0; f < out_c; ++f) {
    for (int c = 0; c < in_c; ++c) {
      double* dwbase = dw + ((f * in_c + c) * k) * k;
      const double* wbase = w + ((f * in_c + c) * k) * k;
      const double* inp = in + c * in_hw * in_hw;
      double* dinp = din ? din + c * in_hw * in_hw : nullptr;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          double acc = 0.0;
          const double wv = wbase[ky * k + kx];
          for (int y = 0; y < out_hw; ++y) {
            const double* src = inp + (y + ky) * in_hw + kx;
            const double* d = dout + (f * out_hw + y) * out_hw;
            for (int x = 0; x < out_hw; ++x) acc += src[x] * d[x];
            if (dinp) {
              double* di = dinp + (y + ky) * in_hw + kx;
              for (int x = 0; x < out_hw; ++x) di[x] += wv * d[x];
            }
          }
          dwbase[ky * k + kx] += acc;
        }
      }
    }
  }
}

void relu(const std::vector<double>& z, std::vector<double>& a) {
  for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const std::vector<double>& z, const std::vector<double>& da,
                   std::vector<double>& dz) {
  for (std::size_t i = 0; i < z.size(); ++i) dz[i] = z[i] > 0.0 ? da[i] : 0.0;
}

// 2x2 max pool, stride 2, argmax recorded as flat input index.
void maxpool(const double* in, int channels, int in_hw, double* out, int* idx) {
  const int out_hw = in_hw / 2;
  for (int c = 0; c < channels; ++c) {
    const double* inp = in + c * in_hw * in_hw;
    for (int y = 0; y < out_hw; ++y) {
      for (int x = 0; x < out_hw; ++x) {
        int base = (2 * y) * in_hw + 2 * x;
        int best = base;
        double bv = inp[base];
        const int cand[3] = {base + 1, base + in_hw, base + in_hw + 1};
        for (int t : cand) {
          if (inp[t] > bv) {
            bv = inp[t];
            best = t;
          }
        }
        out[(c * out_hw + y) * out_hw + x] = bv;
        idx[(c * out_hw + y) * out_hw + x] = c * in_hw * in_hw + best;
      }
    }
  }
}

void maxpool_backward(const double* dout, const int* idx, int n_out, double* din) {
  for (int i = 0; i < n_out; ++i) din[idx[i]] += dout[i];
}

void fc_forward(const double* in, int n_in, const double* w, const double* b,
                int n_out, double* out) {
  for (int o = 0; o < n_out; ++o) {
    const double* row = w + o * n_in;
    double acc = b[o];
    for (int i = 0; i < n_in; ++i) acc += row[i] * in[i];
    out[o] = acc;
  }
}

void fc_backward(const double* in, int n_in, const double* w, int n_out,
                 const double* dout, double* dw, double* db, double* din) {
  for (int o = 0; o < n_out; ++o) {
    const double g = dout[o];
    db[o] += g;
    double* dwrow = dw + o * n_in;
    for (int i = 0; i < n_in; ++i) dwrow[i] += g * in[i];
  }
  if (din) {
    std::fill(din, din + n_in, 0.0);
    for (int o = 0; o < n_out; ++o) {
      const double g = dout[o];
      const double* row = w + o * n_in;
      for (int i = 0; i < n_in; ++i) din[i] += g * row[i];
    }
  }
}

}  // namespace

DomainClassifier::Trace::Trace()
    : x0(3 * kIn * kIn),
      z1(kC1 * kConv1 * kConv1),
      a1(kC1 * kConv1 * kConv1),
      p1(kC1 * kPool1 * kPool1),
      i1(kC1 * kPool1 * kPool1),
      z2(kC2 * kConv2 * kConv2),
      a2(kC2 * kConv2 * kConv2),
      p2(kFlat),
      i2(kFlat),
      z3(kFc1),
      a3(kFc1),
      z4(kFc2),
      a4(kFc2),
      z5(kOut) {}

DomainClassifier::BackwardScratch::BackwardScratch()
    : dz5(kOut),
      da4(kFc2),
      dz4(kFc2),
      da3(kFc1),
      dz3(kFc1),
      dp2(kFlat),
      da2(kC2 * kConv2 * kConv2),
      dz2(kC2 * kConv2 * kConv2),
      dp1(kC1 * kPool1 * kPool1),
      da1(kC1 * kConv1 * kConv1),
      dz1(kC1 * kConv1 * kConv1) {}

DomainClassifier::DomainClassifier()
    : w1_(kC1 * 3 * kK * kK),
      b1_(kC1),
      w2_(kC2 * kC1 * kK * kK),
      b2_(kC2),
      wf1_(kFc1 * kFlat),
      bf1_(kFc1),
      wf2_(kFc2 * kFc1),
      bf2_(kFc2),
      wf3_(kOut * kFc2),
      bf3_(kOut),
      gw1_(w1_.size()),
      gb1_(b1_.size()),
      gw2_(w2_.size()),
      gb2_(b2_.size()),
      gwf1_(wf1_.size()),
      gbf1_(bf1_.size()),
      gwf2_(wf2_.size()),
      gbf2_(bf2_.size()),
      gwf3_(wf3_.size()),
      gbf3_(bf3_.size()) {}

void DomainClassifier::init_weights(RngStream& rng) {
  auto he_uniform = [&rng](std::vector<double>& w, int fan_in) {
    const double bound = std::sqrt(6.0 / fan_in);
    for (double& v : w) v = rng.uniform(-bound, bound);
  };
  he_uniform(w1_, 3 * kK * kK);
  he_uniform(w2_, kC1 * kK * kK);
  he_uniform(wf1_, kFlat);
  he_uniform(wf2_, kFc1);
  he_uniform(wf3_, kFc2);
  std::fill(b1_.begin(), b1_.end(), 0.0);
  std::fill(b2_.begin(), b2_.end(), 0.0);
  std::fill(bf1_.begin(), bf1_.end(), 0.0);
  std::fill(bf2_.begin(), bf2_.end(), 0.0);
  std::fill(bf3_.begin(), bf3_.end(), 0.0);
}

void DomainClassifier::forward(const std::vector<double>& input, Trace& t) const {
  if (input.size() != t.x0.size()) throw ValidationError("classifier input must be 3x32x32");
  t.x0 = input;
  conv_forward(t.x0.data(), 3, kIn, w1_.data(), b1_.data(), kC1, kK, t.z1.data());
  relu(t.z1, t.a1);
  maxpool(t.a1.data(), kC1, kConv1, t.p1.data(), t.i1.data());
  conv_forward(t.p1.data(), kC1, kPool1, w2_.data(), b2_.data(), kC2, kK, t.z2.data());
  relu(t.z2, t.a2);
  maxpool(t.a2.data(), kC2, kConv2, t.p2.data(), t.i2.data());
  fc_forward(t.p2.data(), kFlat, wf1_.data(), bf1_.data(), kFc1, t.z3.data());
  relu(t.z3, t.a3);
  fc_forward(t.a3.data(), kFc1, wf2_.data(), bf2_.data(), kFc2, t.z4.data());
  relu(t.z4, t.a4);
  fc_forward(t.a4.data(), kFc2, wf3_.data(), bf3_.data(), kOut, t.z5.data());
}

double DomainClassifier::loss(const Trace& t, int label) {
  const double m = std::max(t.z5[0], t.z5[1]);
  const double lse = m + std::log(std::exp(t.z5[0] - m) + std::exp(t.z5[1] - m));
  return lse - t.z5[label];
}

int DomainClassifier::predict(const Trace& t) { return t.z5[1] > t.z5[0] ? 1 : 0; }

double DomainClassifier::loss_from_stage(Stage stage, const Trace& base, int label,
                                         Trace& s) const {
  if (stage <= kStageConv1) {
    conv_forward(base.x0.data(), 3, kIn, w1_.data(), b1_.data(), kC1, kK, s.z1.data());
    relu(s.z1, s.a1);
    maxpool(s.a1.data(), kC1, kConv1, s.p1.data(), s.i1.data());
  }
  const std::vector<double>& p1 = stage <= kStageConv1 ? s.p1 : base.p1;
  if (stage <= kStageConv2) {
    conv_forward(p1.data(), kC1, kPool1, w2_.data(), b2_.data(), kC2, kK, s.z2.data());
    relu(s.z2, s.a2);
    maxpool(s.a2.data(), kC2, kConv2, s.p2.data(), s.i2.data());
  }
  const std::vector<double>& p2 = stage <= kStageConv2 ? s.p2 : base.p2;
  if (stage <= kStageFc1) {
    fc_forward(p2.data(), kFlat, wf1_.data(), bf1_.data(), kFc1, s.z3.data());
    relu(s.z3, s.a3);
  }
  const std::vector<double>& a3 = stage <= kStageFc1 ? s.a3 : base.a3;
  if (stage <= kStageFc2) {
    fc_forward(a3.data(), kFc1, wf2_.data(), bf2_.data(), kFc2, s.z4.data());
    relu(s.z4, s.a4);
  }
  const std::vector<double>& a4 = stage <= kStageFc2 ? s.a4 : base.a4;
  fc_forward(a4.data(), kFc2, wf3_.data(), bf3_.data(), kOut, s.z5.data());
  return loss(s, label);
}

void DomainClassifier::zero_grad() {
  auto z = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
  z(gw1_);
  z(gb1_);
  z(gw2_);
  z(gb2_);
  z(gwf1_);
  z(gbf1_);
  z(gwf2_);
  z(gbf2_);
  z(gwf3_);
  z(gbf3_);
}

double DomainClassifier::backward(const Trace& t, int label) {
  const double l = loss(t, label);
  // softmax - onehot
  const double m = std::max(t.z5[0], t.z5[1]);
  const double e0 = std::exp(t.z5[0] - m);
  const double e1 = std::exp(t.z5[1] - m);
  const double sum = e0 + e1;
  bw_.dz5[0] = e0 / sum;
  bw_.dz5[1] = e1 / sum;
  bw_.dz5[label] -= 1.0;

  fc_backward(t.a4.data(), kFc2, wf3_.data(), kOut, bw_.dz5.data(), gwf3_.data(),
              gbf3_.data(), bw_.da4.data());
  relu_backward(t.z4, bw_.da4, bw_.dz4);
  fc_backward(t.a3.data(), kFc1, wf2_.data(), kFc2, bw_.dz4.data(), gwf2_.data(),
              gbf2_.data(), bw_.da3.data());
  relu_backward(t.z3, bw_.da3, bw_.dz3);
  fc_backward(t.p2.data(), kFlat, wf1_.data(), kFc1, bw_.dz3.data(), gwf1_.data(),
              gbf1_.data(), bw_.dp2.data());

  std::fill(bw_.da2.begin(), bw_.da2.end(), 0.0);
  maxpool_backward(bw_.dp2.data(), t.i2.data(), kFlat, bw_.da2.data());
  relu_backward(t.z2, bw_.da2, bw_.dz2);
  std::fill(bw_.dp1.begin(), bw_.dp1.end(), 0.0);
  conv_backward(t.p1.data(), kC1, kPool1, w2_.data(), kC2, kK, bw_.dz2.data(),
                gw2_.data(), gb2_.data(), bw_.dp1.data());

  std::fill(bw_.da1.begin(), bw_.da1.end(), 0.0);
  maxpool_backward(bw_.dp1.data(), t.i1.data(), static_cast<int>(bw_.dp1.size()),
                   bw_.da1.data());
  relu_backward(t.z1, bw_.da1, bw_.dz1);
  conv_backward(t.x0.data(), 3, kIn, w1_.data(), kC1, kK, bw_.dz1.data(), gw1_.data(),
                gb1_.data(), nullptr);
  return l;
}

std::vector<DomainClassifier::ParamTensor> DomainClassifier::param_tensors() {
  return {
      {"conv1.w", kStageConv1, &w1_, &gw1_}, {"conv1.b", kStageConv1, &b1_, &gb1_},
      {"conv2.w", kStageConv2, &w2_, &gw2_}, {"conv2.b", kStageConv2, &b2_, &gb2_},
      {"fc1.w", kStageFc1, &wf1_, &gwf1_},   {"fc1.b", kStageFc1, &bf1_, &gbf1_},
      {"fc2.w", kStageFc2, &wf2_, &gwf2_},   {"fc2.b", kStageFc2, &bf2_, &gbf2_},
      {"fc3.w", kStageFc3, &wf3_, &gwf3_},   {"fc3.b", kStageFc3, &bf3_, &gbf3_},
  };
}

std::vector<double> to_classifier_input(const Raster& patch) {
  if (patch.width() != DomainClassifier::kIn || patch.height() != DomainClassifier::kIn) {
    throw ValidationError("classifier patches must be 32x32");
  }
  const int n = DomainClassifier::kIn;
  std::vector<double> x(3 * n * n);
  for (int y = 0; y < n; ++y) {
    for (int x_ = 0; x_ < n; ++x_) {
      const std::uint8_t* s = patch.px(x_, y);
      for (int c = 0; c < 3; ++c) {
        x[(c * n + y) * n + x_] = s[c] / 255.0;
      }
    }
  }
  return x;
}

}  // namespace pastegen
