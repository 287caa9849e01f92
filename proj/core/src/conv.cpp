#include "stormwarn/conv.hpp"

#include <algorithm>

#include "stormwarn/errors.hpp"

namespace stormwarn {

Tensor4 Tensor4::zeros(int frames, int height, int width, int channels) {
  Tensor4 t;
  t.frames = frames;
  t.height = height;
  t.width = width;
  t.channels = channels;
  t.data.assign(static_cast<std::size_t>(frames) *
                    static_cast<std::size_t>(height) *
                    static_cast<std::size_t>(width) *
                    static_cast<std::size_t>(channels),
                0.0);
  return t;
}

void Tensor4::validate() const {
  if (frames < 1 || height < 1 || width < 1 || channels < 1)
    throw InputError("tensor dimensions must be positive");
  if (data.size() != static_cast<std::size_t>(frames) *
                         static_cast<std::size_t>(height) *
                         static_cast<std::size_t>(width) *
                         static_cast<std::size_t>(channels))
    throw InputError("tensor data does not match its dimensions");
}

ConvBlockParams ConvBlockParams::make(int kernels, int kernel_h, int kernel_w,
                                      int in_channels) {
  ConvBlockParams p;
  p.kernels = kernels;
  p.kernel_h = kernel_h;
  p.kernel_w = kernel_w;
  p.in_channels = in_channels;
  p.kernel.assign(static_cast<std::size_t>(kernels) *
                      static_cast<std::size_t>(kernel_h) *
                      static_cast<std::size_t>(kernel_w) *
                      static_cast<std::size_t>(in_channels),
                  0.0);
  p.bias.assign(static_cast<std::size_t>(kernels), 0.0);
  p.norm_scale.assign(static_cast<std::size_t>(kernels), 1.0);
  p.norm_shift.assign(static_cast<std::size_t>(kernels), 0.0);
  return p;
}

void ConvBlockParams::validate() const {
  if (kernels < 1 || kernel_h < 1 || kernel_w < 1 || in_channels < 1)
    throw InputError("kernel dimensions must be positive");
  if (conv_stride < 1 || pool_size < 1 || pool_stride < 1)
    throw InputError("strides and pool size must be positive");
  if (kernel.size() != static_cast<std::size_t>(kernels) *
                           static_cast<std::size_t>(kernel_h) *
                           static_cast<std::size_t>(kernel_w) *
                           static_cast<std::size_t>(in_channels))
    throw InputError("kernel data does not match its dimensions");
  if (bias.size() != static_cast<std::size_t>(kernels) ||
      norm_scale.size() != static_cast<std::size_t>(kernels) ||
      norm_shift.size() != static_cast<std::size_t>(kernels))
    throw InputError("per-channel parameter counts must equal the kernel count");
}

int conv_same_out(int in, int stride) { return (in + stride - 1) / stride; }

int pool_valid_out(int in, int pool, int stride) {
  if (in < pool) throw InputError("spatial extent smaller than the pool window");
  return (in - pool) / stride + 1;
}

Tensor4 conv_block_forward(const Tensor4& input, const ConvBlockParams& block) {
  input.validate();
  block.validate();
  if (input.channels != block.in_channels)
    throw AlignmentError("input channels do not match the kernel depth");

  const int conv_h = conv_same_out(input.height, block.conv_stride);
  const int conv_w = conv_same_out(input.width, block.conv_stride);
  // 'same': pad so the strided output covers the input; the extra padding
  // cell (odd totals) goes after, not before.
  const int pad_h_total =
      std::max((conv_h - 1) * block.conv_stride + block.kernel_h - input.height, 0);
  const int pad_w_total =
      std::max((conv_w - 1) * block.conv_stride + block.kernel_w - input.width, 0);
  const int pad_top = pad_h_total / 2;
  const int pad_left = pad_w_total / 2;

  const int out_h = pool_valid_out(conv_h, block.pool_size, block.pool_stride);
  const int out_w = pool_valid_out(conv_w, block.pool_size, block.pool_stride);

  Tensor4 conv = Tensor4::zeros(input.frames, conv_h, conv_w, block.kernels);
  for (int f = 0; f < input.frames; ++f) {
    for (int oy = 0; oy < conv_h; ++oy) {
      for (int ox = 0; ox < conv_w; ++ox) {
        const int y0 = oy * block.conv_stride - pad_top;
        const int x0 = ox * block.conv_stride - pad_left;
        for (int k = 0; k < block.kernels; ++k) {
          double acc = block.bias[static_cast<std::size_t>(k)];
          for (int ky = 0; ky < block.kernel_h; ++ky) {
            const int y = y0 + ky;
            if (y < 0 || y >= input.height) continue;
            for (int kx = 0; kx < block.kernel_w; ++kx) {
              const int x = x0 + kx;
              if (x < 0 || x >= input.width) continue;
              for (int c = 0; c < block.in_channels; ++c)
                acc += input.at(f, y, x, c) *
                       block.kernel[block.kernel_index(k, ky, kx, c)];
            }
          }
          acc = acc * block.norm_scale[static_cast<std::size_t>(k)] +
                block.norm_shift[static_cast<std::size_t>(k)];
          conv.at(f, oy, ox, k) = std::max(0.0, acc);
        }
      }
    }
  }

  Tensor4 out = Tensor4::zeros(input.frames, out_h, out_w, block.kernels);
  for (int f = 0; f < input.frames; ++f) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        for (int k = 0; k < block.kernels; ++k) {
          double best = conv.at(f, oy * block.pool_stride, ox * block.pool_stride, k);
          for (int py = 0; py < block.pool_size; ++py)
            for (int px = 0; px < block.pool_size; ++px)
              best = std::max(best, conv.at(f, oy * block.pool_stride + py,
                                            ox * block.pool_stride + px, k));
          out.at(f, oy, ox, k) = best;
        }
      }
    }
  }
  return out;
}

}  // namespace stormwarn
