#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tio/errors.hpp"

namespace tio {

// Dense H x W x C tensor of 32-bit floats, row-major with channels
// innermost: index(y, x, c) = (y * W + x) * C + c.
class Tensor3 {
  public:
    Tensor3() = default;
    Tensor3(int height, int width, int channels, float fill = 0.0f);
    Tensor3(int height, int width, int channels, std::vector<float> values);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
    float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    bool same_shape(const Tensor3& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

    // True when every element is finite (no NaN/Inf).
    bool all_finite() const;

    std::size_t index(int y, int x, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

  private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

// "FT1" tensor container: magic "FT1\0", u32le H, W, C, then H*W*C
// f32le values in row-major channel-innermost order.
void write_ft1(std::ostream& out, const Tensor3& t);
void write_ft1_file(const std::string& path, const Tensor3& t);
Tensor3 read_ft1(std::istream& in);
Tensor3 read_ft1_file(const std::string& path);

}  // namespace tio
