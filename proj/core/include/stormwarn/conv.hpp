#pragma once

#include <cstddef>
#include <vector>

namespace stormwarn {

// (frames, height, width, channels), row-major in that order.
struct Tensor4 {
  std::vector<double> data;
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 0;

  static Tensor4 zeros(int frames, int height, int width, int channels);
  std::size_t index(int f, int y, int x, int c) const {
    return ((static_cast<std::size_t>(f) * static_cast<std::size_t>(height) +
             static_cast<std::size_t>(y)) *
                static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  double at(int f, int y, int x, int c) const { return data[index(f, y, x, c)]; }
  double& at(int f, int y, int x, int c) { return data[index(f, y, x, c)]; }
  void validate() const;
};

// One frame-shared block: 2-D convolution with 'same' zero padding, a fixed
// per-channel affine in place of batch normalization, ReLU, then 'valid'
// max pooling. Every frame passes through the same parameters.
struct ConvBlockParams {
  std::vector<double> kernel;  // (kernels, kernel_h, kernel_w, in_channels)
  std::vector<double> bias;    // per output channel
  std::vector<double> norm_scale;
  std::vector<double> norm_shift;
  int kernels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int in_channels = 0;
  int conv_stride = 2;
  int pool_size = 4;
  int pool_stride = 2;

  static ConvBlockParams make(int kernels, int kernel_h, int kernel_w,
                              int in_channels);
  std::size_t kernel_index(int k, int ky, int kx, int c) const {
    return ((static_cast<std::size_t>(k) * static_cast<std::size_t>(kernel_h) +
             static_cast<std::size_t>(ky)) *
                static_cast<std::size_t>(kernel_w) +
            static_cast<std::size_t>(kx)) *
               static_cast<std::size_t>(in_channels) +
           static_cast<std::size_t>(c);
  }
  void validate() const;
};

// ceil(in/stride): 'same' output extent.
int conv_same_out(int in, int stride);
// floor((in-pool)/stride)+1: 'valid' output extent; requires in >= pool.
int pool_valid_out(int in, int pool, int stride);

Tensor4 conv_block_forward(const Tensor4& input, const ConvBlockParams& block);

}  // namespace stormwarn
