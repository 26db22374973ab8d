#include "isc/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "isc/error.hpp"
#include "isc/serialize.hpp"

namespace isc::io {

namespace {

static_assert(std::endian::native == std::endian::little, "float32 rasters assume a little-endian host");

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::Io, path.string() + ": " + what);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  return in;
}

// Reads the P5 header; leaves the stream at the first raster byte.
void read_pgm_header(std::istream& in, const fs::path& path, int& w, int& h, int& maxval) {
  std::string magic;
  in >> magic;
  if (magic != "P5") io_error(path, "not a binary PGM");
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    if (!(in >> v)) io_error(path, "malformed PGM header");
    return v;
  };
  w = next_int();
  h = next_int();
  maxval = next_int();
  in.get();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) io_error(path, "unsupported PGM header");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> split_numbers(const std::string& line, const fs::path& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (...) {
      io_error(path, "bad number '" + cell + "'");
    }
  }
  return out;
}

std::string stack_name(const char* axis, size_t freq, int step, const char* ext) {
  return std::string("stack_") + axis + "_f" + std::to_string(freq) + "_k" + std::to_string(step) + ext;
}

ImageF read_stack_image(const fs::path& path) {
  return path.extension() == ".pgm" ? read_pgm(path) : read_f32(path);
}

}  // namespace

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_pgm(const fs::path& path, const ImageF& img, int bits) {
  if (bits != 8 && bits != 16) io_error(path, "PGM depth must be 8 or 16 bits");
  const int maxval = bits == 8 ? 255 : 65535;
  auto out = open_out(path);
  out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  std::vector<unsigned char> raster;
  raster.reserve(img.size() * (bits / 8));
  for (float v : img.pixels) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * maxval));
    if (bits == 16) raster.push_back(static_cast<unsigned char>(q >> 8));
    raster.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

ImageF read_pgm(const fs::path& path) {
  auto in = open_in(path);
  int w = 0, h = 0, maxval = 0;
  read_pgm_header(in, path, w, h, maxval);
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raster(static_cast<size_t>(w) * h * bytes);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!in) io_error(path, "truncated PGM raster");
  ImageF img(w, h);
  for (size_t i = 0; i < img.size(); ++i) {
    const unsigned v = bytes == 2 ? (raster[2 * i] << 8 | raster[2 * i + 1]) : raster[i];
    img.pixels[i] = static_cast<float>(static_cast<double>(v) / maxval);
  }
  return img;
}

void write_mask_pgm(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& mask) {
  ImageF img(width, height);
  for (size_t i = 0; i < mask.size(); ++i) img.pixels[i] = mask[i] ? 1.0f : 0.0f;
  write_pgm(path, img, 8);
}

std::vector<std::uint8_t> read_mask_pgm(const fs::path& path, int& width, int& height) {
  const ImageF img = read_pgm(path);
  width = img.width;
  height = img.height;
  std::vector<std::uint8_t> mask(img.size());
  for (size_t i = 0; i < mask.size(); ++i) mask[i] = img.pixels[i] > 0.5f ? 1 : 0;
  return mask;
}

void write_f32(const fs::path& path, const ImageF& img) {
  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.size() * sizeof(float)));
  write_text(path.string() + ".json", dump(Json{{"width", img.width}, {"height", img.height}}));
}

ImageF read_f32(const fs::path& path) {
  const Json side = parse_json(read_text(path.string() + ".json"), path.string() + ".json");
  if (!side.contains("width") || !side.contains("height")) io_error(path, "sidecar lacks width/height");
  ImageF img(side["width"].get<int>(), side["height"].get<int>());
  auto in = open_in(path);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.size() * sizeof(float)));
  if (!in) io_error(path, "truncated float32 raster");
  return img;
}

void write_phase_map(const fs::path& prefix, const PhaseMap& map) {
  ImageF phase(map.width, map.height);
  std::transform(map.phase.begin(), map.phase.end(), phase.pixels.begin(),
                 [](double v) { return static_cast<float>(v); });
  write_f32(prefix.string() + ".f32", phase);
  write_mask_pgm(prefix.string() + "_mask.pgm", map.width, map.height, map.mask);
}

PhaseMap read_phase_map(const fs::path& prefix) {
  const ImageF phase = read_f32(prefix.string() + ".f32");
  PhaseMap map;
  map.width = phase.width;
  map.height = phase.height;
  map.phase.assign(phase.pixels.begin(), phase.pixels.end());
  int w = 0, h = 0;
  map.mask = read_mask_pgm(prefix.string() + "_mask.pgm", w, h);
  if (w != map.width || h != map.height) io_error(prefix, "phase and mask sizes differ");
  map.modulation.assign(map.phase.size(), 0.0);
  return map;
}

void write_points_csv(const fs::path& path, const std::vector<Vec2>& pts) {
  auto out = open_out(path);
  for (const auto& p : pts) out << format_double(p.x()) << "," << format_double(p.y()) << "\n";
}

std::vector<Vec2> read_points_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = split_numbers(line, path);
    if (v.size() != 2) io_error(path, "expected x,y per line");
    pts.emplace_back(v[0], v[1]);
  }
  return pts;
}

void write_correspondences_csv(const fs::path& path, const std::vector<Correspondence>& corrs) {
  auto out = open_out(path);
  out << "x_c,y_c,x_p,y_p,X,Y,Z\n";
  for (const auto& c : corrs) {
    out << format_double(c.x_c.x()) << "," << format_double(c.x_c.y()) << "," << format_double(c.x_p.x())
        << "," << format_double(c.x_p.y()) << "," << format_double(c.X.x()) << "," << format_double(c.X.y())
        << "," << format_double(c.X.z()) << "\n";
  }
}

std::vector<Correspondence> read_correspondences_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<Correspondence> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = split_numbers(line, path);
    if (v.size() != 7) io_error(path, "expected 7 columns");
    out.push_back({Vec2(v[0], v[1]), Vec2(v[2], v[3]), Vec3(v[4], v[5], v[6])});
  }
  return out;
}

void write_ply(const fs::path& path, const std::vector<Vec3>& points, const std::vector<double>& error) {
  const bool with_error = !error.empty();
  if (with_error && error.size() != points.size()) io_error(path, "error count differs from point count");
  auto out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (with_error) out << "property double error\n";
  out << "end_header\n";
  char buf[128];
  for (size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g", points[i].x(), points[i].y(), points[i].z());
    out << buf;
    if (with_error) {
      std::snprintf(buf, sizeof buf, " %.6g", error[i]);
      out << buf;
    }
    out << "\n";
  }
}

void write_bundle(const fs::path& dir, const SceneBundle& bundle, StackFormat format) {
  fs::create_directories(dir);
  const char* ext = format == StackFormat::Float32 ? ".f32" : ".pgm";
  const auto& truth = bundle.truth;
  Json spheres = Json::array();
  for (size_t s = 0; s < bundle.spheres.size(); ++s) {
    const auto& cap = bundle.spheres[s];
    const std::string sub = "sphere" + std::to_string(s);
    write_points_csv(dir / sub / "contour.csv", cap.contour);
    Json files{{"vertical", Json::array()}, {"horizontal", Json::array()}};
    for (const auto& [axis, images] : {std::pair{"vertical", &cap.vertical}, std::pair{"horizontal", &cap.horizontal}}) {
      for (size_t i = 0; i < images->size(); ++i) {
        const size_t freq = i / static_cast<size_t>(truth.steps);
        const int step = static_cast<int>(i % static_cast<size_t>(truth.steps));
        const std::string name = sub + "/" + stack_name(axis[0] == 'v' ? "v" : "h", freq, step, ext);
        if (format == StackFormat::Float32) {
          write_f32(dir / name, (*images)[i]);
        } else {
          write_pgm(dir / name, (*images)[i], 16);
        }
        files[axis].push_back(name);
      }
    }
    write_correspondences_csv(dir / "oracle" / (sub + "_correspondences.csv"), cap.oracle);
    spheres.push_back(Json{{"contour", sub + "/contour.csv"},
                           {"roi", {{"x0", cap.roi.x0}, {"y0", cap.roi.y0}, {"width", cap.roi.width}, {"height", cap.roi.height}}},
                           {"stacks", files},
                           {"oracle", "oracle/" + sub + "_correspondences.csv"}});
  }
  const Json manifest{{"format", "isc-bundle/1"},
                      {"scene", to_json(truth)},
                      {"stack_format", format == StackFormat::Float32 ? "float32" : "pgm16"},
                      {"spheres", spheres}};
  write_text(dir / "manifest.json", dump(manifest));
}

SceneBundle read_bundle(const fs::path& dir, bool* has_oracle) {
  const fs::path manifest_path = dir / "manifest.json";
  const Json manifest = parse_json(read_text(manifest_path), manifest_path.string());
  if (!manifest.contains("scene") || !manifest.contains("spheres")) {
    io_error(manifest_path, "manifest lacks scene or spheres");
  }
  SceneBundle bundle;
  bundle.truth = scene_from_json(manifest["scene"]);
  const bool oracle_present = fs::is_directory(dir / "oracle");
  for (const auto& entry : manifest["spheres"]) {
    SphereCapture cap;
    cap.contour = read_points_csv(dir / entry.at("contour").get<std::string>());
    const auto& roi = entry.at("roi");
    cap.roi = {roi.at("x0").get<int>(), roi.at("y0").get<int>(), roi.at("width").get<int>(), roi.at("height").get<int>()};
    for (const auto& f : entry.at("stacks").at("vertical")) cap.vertical.push_back(read_stack_image(dir / f.get<std::string>()));
    for (const auto& f : entry.at("stacks").at("horizontal")) cap.horizontal.push_back(read_stack_image(dir / f.get<std::string>()));
    if (oracle_present && entry.contains("oracle") && fs::exists(dir / entry["oracle"].get<std::string>())) {
      cap.oracle = read_correspondences_csv(dir / entry["oracle"].get<std::string>());
    }
    bundle.spheres.push_back(std::move(cap));
  }
  if (has_oracle) *has_oracle = oracle_present;
  return bundle;
}

}  // namespace isc::io
