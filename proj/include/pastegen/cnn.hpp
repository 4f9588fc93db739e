#pragma once

#include <string>
#include <vector>

#include "pastegen/raster.hpp"
#include "pastegen/rng.hpp"

namespace pastegen {

// Small domain classifier for 32x32 RGB patches:
//   conv(5x5, 6) - relu - maxpool(2) - conv(5x5, 16) - relu - maxpool(2)
//   - fc(400, 120) - relu - fc(120, 84) - relu - fc(84, 2)
// All math in double precision; forward, backprop, and the SGD step are
// hand-rolled and fully deterministic for a given seed.
class DomainClassifier {
 public:
  static constexpr int kIn = 32;
  static constexpr int kK = 5;
  static constexpr int kC1 = 6;
  static constexpr int kConv1 = kIn - kK + 1;    // 28
  static constexpr int kPool1 = kConv1 / 2;      // 14
  static constexpr int kC2 = 16;
  static constexpr int kConv2 = kPool1 - kK + 1; // 10
  static constexpr int kPool2 = kConv2 / 2;      // 5
  static constexpr int kFlat = kC2 * kPool2 * kPool2;
  static constexpr int kFc1 = 120;
  static constexpr int kFc2 = 84;
  static constexpr int kOut = 2;
  static_assert(kConv1 == 28 && kPool1 == 14 && kConv2 == 10 && kPool2 == 5);
  static_assert(kFlat == 400);

  // Stages for partial re-evaluation (finite-difference checks).
  enum Stage { kStageConv1 = 0, kStageConv2, kStageFc1, kStageFc2, kStageFc3 };

  DomainClassifier();

  // He-style uniform init, bound sqrt(6 / fan_in); biases zero.
  void init_weights(RngStream& rng);

  struct Trace {
    std::vector<double> x0;      // 3*32*32 input, scaled to [0,1]
    std::vector<double> z1, a1;  // conv1 pre/post relu
    std::vector<double> p1;      // pool1
    std::vector<int> i1;         // pool1 argmax (flat index into a1)
    std::vector<double> z2, a2;
    std::vector<double> p2;      // pool2 == flattened fc input
    std::vector<int> i2;
    std::vector<double> z3, a3;  // fc1
    std::vector<double> z4, a4;  // fc2 (a4 is the feature vector)
    std::vector<double> z5;      // logits
    Trace();
  };

  void forward(const std::vector<double>& input, Trace& t) const;
  static double loss(const Trace& t, int label);  // softmax cross-entropy
  static int predict(const Trace& t);

  // Recompute the loss starting at `stage`, reusing the stage's input
  // activations already present in `base`. Exact, since perturbing a
  // parameter of a layer cannot change activations upstream of it.
  double loss_from_stage(Stage stage, const Trace& base, int label, Trace& scratch) const;

  void zero_grad();
  // Accumulates unscaled gradient sums into the grad buffers and returns
  // this sample's loss. Not thread-safe: shared backward scratch.
  double backward(const Trace& t, int label);

  struct ParamTensor {
    std::string name;
    Stage stage;
    std::vector<double>* w;
    std::vector<double>* g;
  };
  std::vector<ParamTensor> param_tensors();

  static const std::vector<double>& features(const Trace& t) { return t.a4; }

 private:
  std::vector<double> w1_, b1_, w2_, b2_;        // conv weights [out][in][k][k]
  std::vector<double> wf1_, bf1_, wf2_, bf2_, wf3_, bf3_;
  std::vector<double> gw1_, gb1_, gw2_, gb2_;
  std::vector<double> gwf1_, gbf1_, gwf2_, gbf2_, gwf3_, gbf3_;

  struct BackwardScratch {
    std::vector<double> dz5, da4, dz4, da3, dz3, dp2, da2, dz2, dp1, da1, dz1;
    BackwardScratch();
  };
  BackwardScratch bw_;
};

// Planar [c][y][x] doubles in [0,1] from an 8-bit patch.
std::vector<double> to_classifier_input(const Raster& patch);

struct TrainParams {
  double lr = 0.01;
  double momentum = 0.9;
  int batch_size = 64;
  int epochs = 30;

  bool operator==(const TrainParams&) const = default;
};

}  // namespace pastegen
