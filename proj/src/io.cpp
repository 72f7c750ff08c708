#include "fftdeblur/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>

#include "fftdeblur/blind.hpp"

namespace fftdeblur::io {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

bool looks_like_image(const fs::path& p) {
  const std::string ext = lower_extension(p);
  for (const char* e : {".png", ".jpg", ".jpeg", ".tif", ".tiff", ".pfm", ".bmp", ".pgm", ".ppm"})
    if (ext == e) return true;
  return false;
}

fs::path temp_sibling(const fs::path& target) {
  static std::atomic<unsigned> counter{0};
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const std::string name = "." + target.stem().string() + ".tmp-" + std::to_string(::getpid()) +
                           "-" + std::to_string(counter++) + target.extension().string();
  return dir / name;
}

}  // namespace

LoadedImage read_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(Errc::Io, "cannot open " + path.string());
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw Error(Errc::Io, "cannot decode " + path.string());

  double scale = 1.0;
  int depth = 32;
  switch (raw.depth()) {
    case CV_8U: scale = 1.0 / 255.0; depth = 8; break;
    case CV_16U: scale = 1.0 / 65535.0; depth = 16; break;
    case CV_32F:
    case CV_64F: break;
    default: throw Error(Errc::Io, "unsupported sample type in " + path.string());
  }
  cv::Mat values;
  raw.convertTo(values, CV_64F, scale);

  const int ch = values.channels();
  std::vector<cv::Mat> planes;
  cv::split(values, planes);
  std::vector<int> order;
  if (ch == 1 || ch == 2) order = {0};
  else if (ch == 3 || ch == 4) order = {2, 1, 0};  // BGR(A) -> RGB
  else throw Error(Errc::Io, "unsupported channel count in " + path.string());

  const auto h = std::size_t(values.rows), w = std::size_t(values.cols);
  std::vector<ImagePlane> channels;
  for (int idx : order) {
    ImagePlane p(h, w);
    for (std::size_t r = 0; r < h; ++r) {
      const double* src = planes[std::size_t(idx)].ptr<double>(int(r));
      std::copy(src, src + w, &p(r, 0));
    }
    if (!p.all_finite()) throw Error(Errc::Io, "non-finite samples in " + path.string());
    channels.push_back(std::move(p));
  }
  return {ImageTensor(std::move(channels)), depth};
}

void write_image(const fs::path& path, const ImageTensor& image, int bit_depth) {
  const std::string ext = lower_extension(path);
  if ((ext == ".jpg" || ext == ".jpeg") && bit_depth != 8) bit_depth = 8;
  int type = CV_8U;
  double scale = 255.0;
  if (bit_depth == 16) {
    type = CV_16U;
    scale = 65535.0;
  } else if (bit_depth == 32) {
    type = CV_32F;
    scale = 1.0;
  } else if (bit_depth != 8) {
    throw Error(Errc::InvalidParameter, "bit depth must be 8, 16 or 32");
  }

  const int h = int(image.height()), w = int(image.width());
  std::vector<cv::Mat> planes;
  for (std::size_t c = image.channels(); c-- > 0;) {  // RGB -> BGR
    cv::Mat p(h, w, CV_64F);
    for (int r = 0; r < h; ++r) {
      double* dst = p.ptr<double>(r);
      for (int col = 0; col < w; ++col) {
        double v = image[c](std::size_t(r), std::size_t(col));
        if (bit_depth != 32) v = std::clamp(v, 0.0, 1.0);
        dst[col] = v;
      }
    }
    planes.push_back(p);
  }
  cv::Mat merged, out;
  cv::merge(planes, merged);
  merged.convertTo(out, type, scale);  // saturate_cast rounds to nearest

  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), out);
  } catch (const cv::Exception& e) {
    throw Error(Errc::Io, "cannot encode " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(Errc::Io, "cannot write " + path.string());
}

std::string format_kernel_text(const Kernel& k) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < k.size(); ++r) {
    for (std::size_t c = 0; c < k.size(); ++c) {
      if (c) os << ' ';
      os << k(r, c);
    }
    os << '\n';
  }
  return os.str();
}

void write_kernel_text(const fs::path& path, const Kernel& k) {
  std::ofstream out(path);
  out << format_kernel_text(k);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

void write_kernel_image(const fs::path& path, const Kernel& k) {
  const double peak = *std::max_element(k.weights().begin(), k.weights().end());
  ImagePlane p(k.size(), k.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = peak > 0.0 ? std::max(0.0, k.weights()[i]) / peak : 0.0;
  write_image(path, ImageTensor(std::move(p)), 8);
}

Kernel read_kernel(const fs::path& path) {
  if (looks_like_image(path)) {
    const ImagePlane p = luminance(read_image(path).image);
    if (p.height() != p.width() || p.height() % 2 == 0)
      throw Error(Errc::InvalidParameter, "kernel image must be square with odd side");
    return normalize_kernel(Kernel(p.height(), std::vector<double>(p.data().begin(), p.data().end())));
  }

  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string token;
    while (ls >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(Errc::Io, "malformed kernel value '" + token + "' in " + path.string());
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw Error(Errc::Io, "empty kernel file " + path.string());
  std::vector<double> weights;
  for (const auto& row : rows) {
    if (row.size() != n) throw Error(Errc::InvalidParameter, "kernel rows must form a square");
    weights.insert(weights.end(), row.begin(), row.end());
  }
  if (n % 2 == 0) throw Error(Errc::InvalidParameter, "kernel side must be odd");
  return normalize_kernel(Kernel(n, std::move(weights)));
}

StagedOutputs::~StagedOutputs() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& [tmp, target] : staged_) fs::remove(tmp, ec);
}

fs::path StagedOutputs::stage(const fs::path& target) {
  fs::path tmp = temp_sibling(target);
  staged_.emplace_back(tmp, target);
  return tmp;
}

void StagedOutputs::commit() {
  for (const auto& [tmp, target] : staged_) {
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(Errc::Io, "cannot move output into place: " + target.string());
  }
  committed_ = true;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  StagedOutputs staged;
  const fs::path tmp = staged.stage(path);
  {
    std::ofstream out(tmp);
    out << text;
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  }
  staged.commit();
}

}  // namespace fftdeblur::io
