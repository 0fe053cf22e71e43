#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "anahita/core.hpp"

namespace anahita {
namespace vision {

struct ImageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Image {
  int width = 0, height = 0, channels = 1;
  std::vector<std::uint8_t> data;  // row-major, interleaved

  static Image create(int w, int h, int c, std::uint8_t fill = 0) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3))
      throw ImageError("invalid image dimensions");
    Image img;
    img.width = w;
    img.height = h;
    img.channels = c;
    img.data.assign(static_cast<size_t>(w) * h * c, fill);
    return img;
  }

  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
};

// ---------------------------------------------------------------------------
// PGM (P5) / PPM (P6) binary I/O

inline void write_pnm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot open for write: " + path);
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

inline Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open: " + path);
  std::string magic;
  in >> magic;
  int channels;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw ImageError("unsupported PNM magic: " + magic);

  auto next_int = [&in, &path]() {
    // skip whitespace and # comments
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') in.ignore(1 << 20, '\n');
      else in.get();
      c = in.peek();
    }
    int v;
    if (!(in >> v)) throw ImageError("bad PNM header: " + path);
    return v;
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (maxval != 255) throw ImageError("only 8-bit PNM supported");
  in.get();  // single whitespace after maxval
  Image img = Image::create(w, h, channels);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
    throw ImageError("truncated PNM data: " + path);
  return img;
}

// ---------------------------------------------------------------------------
// Synthetic scene rendering

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct Shape {
  enum class Kind { disk, rect } kind = Kind::disk;
  // disk: cx, cy, radius; rect: x, y (top-left), w, h
  double a = 0, b = 0, c = 0, d = 0;
  Rgb color;
};

struct SceneSpec {
  int width = 320, height = 240;
  Rgb background{20, 40, 70};
  std::vector<Shape> shapes;
};

inline Image render_scene(const SceneSpec& spec) {
  Image img = Image::create(spec.width, spec.height, 3);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      img.at(x, y, 0) = spec.background.r;
      img.at(x, y, 1) = spec.background.g;
      img.at(x, y, 2) = spec.background.b;
    }
  for (const auto& s : spec.shapes) {
    if (s.kind == Shape::Kind::disk) {
      const double cx = s.a, cy = s.b, r = s.c;
      if (cx - r < 0 || cy - r < 0 || cx + r >= spec.width || cy + r >= spec.height)
        throw ImageError("render_scene: disk outside canvas");
      const int x0 = static_cast<int>(std::floor(cx - r));
      const int x1 = static_cast<int>(std::ceil(cx + r));
      const int y0 = static_cast<int>(std::floor(cy - r));
      const int y1 = static_cast<int>(std::ceil(cy + r));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const double dx = x - cx, dy = y - cy;
          if (dx * dx + dy * dy <= r * r) {
            img.at(x, y, 0) = s.color.r;
            img.at(x, y, 1) = s.color.g;
            img.at(x, y, 2) = s.color.b;
          }
        }
    } else {
      const int x0 = static_cast<int>(std::lround(s.a));
      const int y0 = static_cast<int>(std::lround(s.b));
      const int w = static_cast<int>(std::lround(s.c));
      const int h = static_cast<int>(std::lround(s.d));
      if (x0 < 0 || y0 < 0 || x0 + w > spec.width || y0 + h > spec.height)
        throw ImageError("render_scene: rect outside canvas");
      for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) {
          img.at(x, y, 0) = s.color.r;
          img.at(x, y, 1) = s.color.g;
          img.at(x, y, 2) = s.color.b;
        }
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Underwater degradation

struct DegradeConfig {
  std::array<double, 3> beta{0.40, 0.20, 0.10};  // 1/m, red fades fastest
  std::array<std::uint8_t, 3> backlight{30, 70, 110};
  double distance = 0.0;  // m
};

/// out = in*exp(-beta*d) + backlight*(1 - exp(-beta*d)) per channel.
inline Image degrade(const Image& img, const DegradeConfig& cfg) {
  Image out = img;
  const int nc = img.channels;
  std::array<double, 3> k;
  for (int c = 0; c < 3; ++c) k[static_cast<size_t>(c)] = std::exp(-cfg.beta[static_cast<size_t>(c)] * cfg.distance);
  for (size_t i = 0; i < img.data.size(); ++i) {
    const auto c = static_cast<size_t>(i % static_cast<size_t>(nc));
    const double v = img.data[i] * k[c] + cfg.backlight[c] * (1.0 - k[c]);
    out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

// ---------------------------------------------------------------------------
// White balance (per-channel histogram stretch)

inline Image white_balance(const Image& img, double discard_ratio) {
  if (discard_ratio < 0.0 || discard_ratio >= 0.5)
    throw ImageError("white_balance: discard_ratio must be in [0, 0.5)");
  Image out = img;
  const int nc = img.channels;
  const size_t npix = static_cast<size_t>(img.width) * img.height;
  const double budget = discard_ratio * static_cast<double>(npix);

  for (int c = 0; c < nc; ++c) {
    std::array<size_t, 256> hist{};
    for (size_t i = 0; i < npix; ++i)
      hist[img.data[i * static_cast<size_t>(nc) + static_cast<size_t>(c)]]++;

    // low: smallest v with count(<= v) > budget, so that fewer than
    // budget pixels fall strictly below the cut
    int low = 0;
    size_t cum = 0;
    for (int v = 0; v < 256; ++v) {
      cum += hist[static_cast<size_t>(v)];
      if (static_cast<double>(cum) > budget) {
        low = v;
        break;
      }
    }
    int high = 255;
    cum = 0;
    for (int v = 255; v >= 0; --v) {
      cum += hist[static_cast<size_t>(v)];
      if (static_cast<double>(cum) > budget) {
        high = v;
        break;
      }
    }
    if (high <= low) continue;  // degenerate channel, leave unchanged

    const double scale = 255.0 / (high - low);
    for (size_t i = 0; i < npix; ++i) {
      auto& px = out.data[i * static_cast<size_t>(nc) + static_cast<size_t>(c)];
      const double stretched = (img.data[i * static_cast<size_t>(nc) + static_cast<size_t>(c)] - low) * scale;
      px = static_cast<std::uint8_t>(std::clamp(std::lround(stretched), 0L, 255L));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CLAHE

namespace detail {

/// Per-tile transfer function: clipped histogram, uniform redistribution,
/// direct CDF mapping. A single-bin histogram maps to identity.
inline std::array<std::uint8_t, 256> tile_mapping(
    const std::array<std::uint32_t, 256>& hist, size_t npix,
    double clip_limit) {
  std::array<std::uint8_t, 256> map{};
  int nonzero = 0;
  for (auto h : hist)
    if (h > 0) ++nonzero;
  if (nonzero <= 1) {
    for (int v = 0; v < 256; ++v) map[static_cast<size_t>(v)] = static_cast<std::uint8_t>(v);
    return map;
  }

  std::array<double, 256> clipped;
  const double limit =
      std::max(1.0, clip_limit * static_cast<double>(npix) / 256.0);
  double excess = 0.0;
  for (int v = 0; v < 256; ++v) {
    const double h = hist[static_cast<size_t>(v)];
    if (h > limit) {
      excess += h - limit;
      clipped[static_cast<size_t>(v)] = limit;
    } else {
      clipped[static_cast<size_t>(v)] = h;
    }
  }
  const double share = excess / 256.0;
  double cdf = 0.0;
  for (int v = 0; v < 256; ++v) {
    cdf += clipped[static_cast<size_t>(v)] + share;
    map[static_cast<size_t>(v)] = static_cast<std::uint8_t>(
        std::clamp(std::lround(cdf * 255.0 / static_cast<double>(npix)), 0L, 255L));
  }
  return map;
}

inline void clahe_gray(std::vector<std::uint8_t>& plane, int width, int height,
                       double clip_limit, int tx, int ty) {
  const int tile_w = (width + tx - 1) / tx;
  const int tile_h = (height + ty - 1) / ty;

  std::vector<std::array<std::uint8_t, 256>> maps(static_cast<size_t>(tx) * ty);
  for (int j = 0; j < ty; ++j)
    for (int i = 0; i < tx; ++i) {
      const int x0 = i * tile_w, x1 = std::min(width, x0 + tile_w);
      const int y0 = j * tile_h, y1 = std::min(height, y0 + tile_h);
      std::array<std::uint32_t, 256> hist{};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
          hist[plane[static_cast<size_t>(y) * width + x]]++;
      const size_t npix = static_cast<size_t>(x1 - x0) * (y1 - y0);
      maps[static_cast<size_t>(j) * tx + i] = tile_mapping(hist, npix, clip_limit);
    }

  // Bilinear blend between the four surrounding tile mappings.
  std::vector<std::uint8_t> out(plane.size());
  for (int y = 0; y < height; ++y) {
    const double fy = (y - (tile_h - 1) / 2.0) / tile_h;
    int j0 = static_cast<int>(std::floor(fy));
    double wy = fy - j0;
    int j1 = j0 + 1;
    j0 = std::clamp(j0, 0, ty - 1);
    j1 = std::clamp(j1, 0, ty - 1);
    for (int x = 0; x < width; ++x) {
      const double fx = (x - (tile_w - 1) / 2.0) / tile_w;
      int i0 = static_cast<int>(std::floor(fx));
      double wx = fx - i0;
      int i1 = i0 + 1;
      i0 = std::clamp(i0, 0, tx - 1);
      i1 = std::clamp(i1, 0, tx - 1);

      const std::uint8_t v = plane[static_cast<size_t>(y) * width + x];
      const double m00 = maps[static_cast<size_t>(j0) * tx + i0][v];
      const double m10 = maps[static_cast<size_t>(j0) * tx + i1][v];
      const double m01 = maps[static_cast<size_t>(j1) * tx + i0][v];
      const double m11 = maps[static_cast<size_t>(j1) * tx + i1][v];
      const double blended = (1 - wy) * ((1 - wx) * m00 + wx * m10) +
                             wy * ((1 - wx) * m01 + wx * m11);
      out[static_cast<size_t>(y) * width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(blended), 0L, 255L));
    }
  }
  plane = std::move(out);
}

inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>(
      std::clamp(std::lround(0.299 * r + 0.587 * g + 0.114 * b), 0L, 255L));
}

}  // namespace detail

/// Contrast-limited adaptive histogram equalization. Color images are
/// processed on luminance; the per-pixel luminance shift is applied to
/// all channels so chrominance is untouched.
inline Image clahe(const Image& img, double clip_limit, int tiles_x,
                   int tiles_y) {
  if (tiles_x < 1 || tiles_y < 1) throw ImageError("clahe: tiles must be >= 1");
  if (clip_limit < 1.0) throw ImageError("clahe: clip limit must be >= 1");
  Image out = img;
  if (img.channels == 1) {
    detail::clahe_gray(out.data, img.width, img.height, clip_limit, tiles_x,
                       tiles_y);
    return out;
  }
  const size_t npix = static_cast<size_t>(img.width) * img.height;
  std::vector<std::uint8_t> luma(npix);
  for (size_t i = 0; i < npix; ++i) {
    luma[i] = detail::luminance(img.data[i * 3], img.data[i * 3 + 1],
                                img.data[i * 3 + 2]);
  }
  std::vector<std::uint8_t> mapped = luma;
  detail::clahe_gray(mapped, img.width, img.height, clip_limit, tiles_x,
                     tiles_y);
  for (size_t i = 0; i < npix; ++i) {
    const int delta = static_cast<int>(mapped[i]) - static_cast<int>(luma[i]);
    for (int c = 0; c < 3; ++c) {
      const int v = static_cast<int>(img.data[i * 3 + static_cast<size_t>(c)]) + delta;
      out.data[i * 3 + static_cast<size_t>(c)] =
          static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return out;
}

struct BlueFilterParams {
  double discard_ratio = 0.005;
  double clip_limit = 2.0;
  int tiles_x = 8, tiles_y = 8;
};

/// The enhancement pipeline: white balance then CLAHE, applied linearly.
inline Image blue_filter(const Image& img, const BlueFilterParams& p = {}) {
  return clahe(white_balance(img, p.discard_ratio), p.clip_limit, p.tiles_x,
               p.tiles_y);
}

// ---------------------------------------------------------------------------
// Detection

struct Detection {
  double cx = 0.0, cy = 0.0;  // pixels
  double blob_dim = 0.0;      // max(bbox width, height), pixels
  std::optional<double> distance;  // m, filled after calibration
};

enum class DetectMode { contour, hough };

struct DetectConfig {
  // HSV ranges; hue in [0,360), wrap allowed when hue_min > hue_max
  double hue_min = 0.0, hue_max = 360.0;
  double sat_min = 0.0, sat_max = 1.0;
  double val_min = 0.0, val_max = 1.0;
  int morph_kernel = 5;   // square closing kernel
  int morph_iterations = 1;
  int min_area = 50;      // px, 4-connected component threshold
  DetectMode mode = DetectMode::contour;
};

namespace detail {

inline void rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                       double& h, double& s, double& v) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  v = mx;
  const double d = mx - mn;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r) h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
  else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
  else h = 60.0 * ((r - g) / d + 4.0);
}

inline void dilate(std::vector<std::uint8_t>& mask, int w, int h, int k) {
  const int r = k / 2;
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask[static_cast<size_t>(y) * w + x]) continue;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && nx < w && ny >= 0 && ny < h)
            out[static_cast<size_t>(ny) * w + nx] = 1;
        }
    }
  mask = std::move(out);
}

inline void erode(std::vector<std::uint8_t>& mask, int w, int h, int k) {
  const int r = k / 2;
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy)
        for (int dx = -r; dx <= r && all; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= w || ny < 0 || ny >= h ||
              !mask[static_cast<size_t>(ny) * w + nx])
            all = false;
        }
      if (all) out[static_cast<size_t>(y) * w + x] = 1;
    }
  mask = std::move(out);
}

struct Component {
  int min_x = 1 << 30, max_x = -1, min_y = 1 << 30, max_y = -1;
  size_t area = 0;
};

inline std::optional<Component> largest_component(
    const std::vector<std::uint8_t>& mask, int w, int h, size_t min_area) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::optional<Component> best;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      if (!mask[idx] || seen[idx]) continue;
      Component comp;
      seen[idx] = 1;
      queue.push_back({x, y});
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        comp.area++;
        comp.min_x = std::min(comp.min_x, cx);
        comp.max_x = std::max(comp.max_x, cx);
        comp.min_y = std::min(comp.min_y, cy);
        comp.max_y = std::max(comp.max_y, cy);
        const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : nbr) {
          const int nx = cx + d[0], ny = cy + d[1];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          const size_t nidx = static_cast<size_t>(ny) * w + nx;
          if (mask[nidx] && !seen[nidx]) {
            seen[nidx] = 1;
            queue.push_back({nx, ny});
          }
        }
      }
      if (comp.area >= min_area && (!best || comp.area > best->area))
        best = comp;
    }
  return best;
}

struct HoughLine {
  double rho = 0.0, theta = 0.0;  // x cos(theta) + y sin(theta) = rho
  int votes = 0;
};

/// Straight-line Hough transform over the boundary pixels of a mask.
inline std::vector<HoughLine> hough_lines(const std::vector<std::uint8_t>& mask,
                                          int w, int h, int max_lines) {
  std::vector<std::pair<int, int>> edges;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask[static_cast<size_t>(y) * w + x]) continue;
      bool boundary = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                      !mask[static_cast<size_t>(y) * w + x - 1] ||
                      !mask[static_cast<size_t>(y) * w + x + 1] ||
                      !mask[static_cast<size_t>(y - 1) * w + x] ||
                      !mask[static_cast<size_t>(y + 1) * w + x];
      if (boundary) edges.push_back({x, y});
    }
  const int n_theta = 180;
  const double rho_max = std::hypot(w, h);
  const int n_rho = 2 * static_cast<int>(std::ceil(rho_max)) + 1;
  std::vector<int> acc(static_cast<size_t>(n_theta) * n_rho, 0);
  for (const auto& [x, y] : edges) {
    for (int t = 0; t < n_theta; ++t) {
      const double th = t * kPi / n_theta;
      const double rho = x * std::cos(th) + y * std::sin(th);
      const int ri = static_cast<int>(std::lround(rho)) + n_rho / 2;
      acc[static_cast<size_t>(t) * n_rho + ri]++;
    }
  }
  std::vector<HoughLine> lines;
  std::vector<int> work = acc;
  for (int pick = 0; pick < max_lines; ++pick) {
    int best = 0, best_idx = -1;
    for (size_t i = 0; i < work.size(); ++i)
      if (work[i] > best) {
        best = work[i];
        best_idx = static_cast<int>(i);
      }
    if (best_idx < 0 || best < 10) break;
    const int t = best_idx / n_rho, ri = best_idx % n_rho;
    HoughLine l;
    l.theta = t * kPi / n_theta;
    l.rho = ri - n_rho / 2;
    l.votes = best;
    lines.push_back(l);
    // suppress the neighborhood of the chosen peak
    for (int dt = -8; dt <= 8; ++dt)
      for (int dr = -8; dr <= 8; ++dr) {
        const int tt = (t + dt + n_theta) % n_theta;
        const int rr = ri + dr;
        if (rr >= 0 && rr < n_rho)
          work[static_cast<size_t>(tt) * n_rho + rr] = 0;
      }
  }
  return lines;
}

}  // namespace detail

/// Threshold, close, pick the largest 4-connected component. Returns
/// nothing when no component clears the minimum area.
inline std::optional<Detection> detect(const Image& img,
                                       const DetectConfig& cfg) {
  if (img.channels != 3) throw ImageError("detect: RGB image required");
  const int w = img.width, h = img.height;
  std::vector<std::uint8_t> mask(static_cast<size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double hh, ss, vv;
      detail::rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2), hh,
                         ss, vv);
      bool hue_ok = cfg.hue_min <= cfg.hue_max
                        ? (hh >= cfg.hue_min && hh <= cfg.hue_max)
                        : (hh >= cfg.hue_min || hh <= cfg.hue_max);
      if (hue_ok && ss >= cfg.sat_min && ss <= cfg.sat_max &&
          vv >= cfg.val_min && vv <= cfg.val_max)
        mask[static_cast<size_t>(y) * w + x] = 1;
    }

  for (int it = 0; it < cfg.morph_iterations; ++it)
    detail::dilate(mask, w, h, cfg.morph_kernel);
  for (int it = 0; it < cfg.morph_iterations; ++it)
    detail::erode(mask, w, h, cfg.morph_kernel);

  auto comp =
      detail::largest_component(mask, w, h, static_cast<size_t>(cfg.min_area));
  if (!comp) return std::nullopt;

  Detection det;
  det.blob_dim = std::max(comp->max_x - comp->min_x + 1,
                          comp->max_y - comp->min_y + 1);
  det.cx = (comp->min_x + comp->max_x) / 2.0;
  det.cy = (comp->min_y + comp->max_y) / 2.0;

  if (cfg.mode == DetectMode::hough) {
    auto lines = detail::hough_lines(mask, w, h, 8);
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < lines.size(); ++i)
      for (size_t j = i + 1; j < lines.size(); ++j) {
        const double c1 = std::cos(lines[i].theta), s1 = std::sin(lines[i].theta);
        const double c2 = std::cos(lines[j].theta), s2 = std::sin(lines[j].theta);
        const double den = c1 * s2 - s1 * c2;
        if (std::abs(den) < 1e-6) continue;
        const double x = (lines[i].rho * s2 - lines[j].rho * s1) / den;
        const double y = (lines[j].rho * c1 - lines[i].rho * c2) / den;
        if (x >= 0 && x < w && y >= 0 && y < h) pts.push_back({x, y});
      }
    if (!pts.empty()) {
      double sx = 0, sy = 0;
      for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
      }
      det.cx = sx / static_cast<double>(pts.size());
      det.cy = sy / static_cast<double>(pts.size());
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Distance from blob size

struct DistanceCalib {
  double alpha = 1.0;  // m
  double beta = 0.0;   // 1/px
};

/// Least squares on ln(d) = ln(alpha) - beta*dim.
inline DistanceCalib calibrate(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw ValidationError("calibrate: at least two points required");
  double sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
  for (const auto& [dim, dist] : points) {
    if (dist <= 0.0) throw ValidationError("calibrate: distances must be positive");
    sum_x += dim;
    sum_y += std::log(dist);
    sum_xx += dim * dim;
    sum_xy += dim * std::log(dist);
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sum_xx - sum_x * sum_x;
  if (std::abs(den) < 1e-12)
    throw ValidationError("calibrate: degenerate points (equal dims)");
  const double slope = (n * sum_xy - sum_x * sum_y) / den;
  const double intercept = (sum_y - slope * sum_x) / n;
  return {std::exp(intercept), -slope};
}

inline double estimate_distance(double blob_dim, const DistanceCalib& calib) {
  if (blob_dim <= 0.0)
    throw ValidationError("estimate_distance: blob_dim must be positive");
  return calib.alpha * std::exp(-calib.beta * blob_dim);
}

}  // namespace vision
}  // namespace anahita
