#include "proxyfit/image.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <png.h>

#include "json_util.hpp"

namespace proxyfit {

using detail::json;

void write_png(const std::string& path, const RgbImage& image) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw Error("png write failed for " + path + ": " + msg);
  }
}

RgbImage read_png(const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) throw ParseError("cannot read png " + path + ": " + img.message);
  img.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ParseError("cannot decode png " + path + ": " + msg);
  }
  return out;
}

void write_float_maps(const std::string& bin_path, const std::string& header_path,
                      const std::vector<std::pair<std::string, const FloatMap*>>& planes) {
  static_assert(std::endian::native == std::endian::little, "float map writer assumes a little-endian host");
  if (planes.empty()) throw Error("no planes to write");
  const int w = planes.front().second->width;
  const int h = planes.front().second->height;
  json names = json::array();
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw Error("cannot write " + bin_path);
  for (const auto& [name, map] : planes) {
    if (map->width != w || map->height != h) throw Error("float planes differ in size");
    names.push_back(name);
    out.write(reinterpret_cast<const char*>(map->data.data()), static_cast<std::streamsize>(map->data.size() * sizeof(float)));
  }
  const json header = {{"format", "proxyfit-float-maps"}, {"dtype", "float32"}, {"byte_order", "little"},
                       {"layout", "channel-major, row-major within a channel"}, {"width", w}, {"height", h},
                       {"channels", names}};
  detail::write_json_file(header_path, header);
}

std::vector<std::pair<std::string, FloatMap>> read_float_maps(const std::string& bin_path, const std::string& header_path) {
  const json header = detail::read_json_file(header_path);
  return detail::parse_guard("malformed float map header", [&] {
    const int w = header.at("width").get<int>();
    const int h = header.at("height").get<int>();
    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + bin_path);
    std::vector<std::pair<std::string, FloatMap>> out;
    for (const json& name : header.at("channels")) {
      FloatMap m(w, h);
      in.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(m.data.size() * sizeof(float)));
      if (!in) throw ParseError("truncated float map file " + bin_path);
      out.emplace_back(name.get<std::string>(), std::move(m));
    }
    return out;
  });
}

}  // namespace proxyfit
