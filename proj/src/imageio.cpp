#include "pastegen/imageio.hpp"

#include <algorithm>
#include <cstdio>
#include <csetjmp>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "pastegen/errors.hpp"

namespace pastegen {

namespace {

enum class FileKind { kPng, kJpeg, kUnknown };

FileKind sniff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char magic[4] = {};
  in.read(reinterpret_cast<char*>(magic), sizeof(magic));
  if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G') {
    return FileKind::kPng;
  }
  if (magic[0] == 0xFF && magic[1] == 0xD8) return FileKind::kJpeg;
  return FileKind::kUnknown;
}

LoadedImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IoError("png read failed: " + path.string() + ": " + image.message);
  }
  const bool has_alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    throw IoError("png read failed: " + path.string() + ": " + image.message);
  }
  LoadedImage out;
  out.rgb = Raster(static_cast<int>(image.width), static_cast<int>(image.height));
  if (has_alpha) out.alpha = AlphaMask(out.rgb.width(), out.rgb.height());
  const std::uint8_t* s = buf.data();
  for (int y = 0; y < out.rgb.height(); ++y) {
    for (int x = 0; x < out.rgb.width(); ++x, s += 4) {
      std::uint8_t* d = out.rgb.px(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
      if (out.alpha) out.alpha->at(x, y) = s[3] / 255.0f;
    }
  }
  return out;
}

AlphaMask read_png_gray(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IoError("png read failed: " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    throw IoError("png read failed: " + path.string() + ": " + image.message);
  }
  AlphaMask mask(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < buf.size(); ++i) mask.values()[i] = buf[i] / 255.0f;
  return mask;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(mgr->jump, 1);
}

struct FileCloser {
  std::FILE* f = nullptr;
  ~FileCloser() {
    if (f) std::fclose(f);
  }
};

LoadedImage read_jpeg(const std::filesystem::path& path) {
  FileCloser fc{std::fopen(path.string().c_str(), "rb")};
  if (!fc.f) throw IoError("cannot open " + path.string());

  jpeg_decompress_struct cinfo{};
  JpegErrorMgr err{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("jpeg read failed: " + path.string());
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fc.f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  LoadedImage out;
  out.rgb = Raster(static_cast<int>(cinfo.output_width),
                   static_cast<int>(cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.rgb.px(0, static_cast<int>(cinfo.output_scanline));
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

}  // namespace

LoadedImage load_image(const std::filesystem::path& path) {
  switch (sniff(path)) {
    case FileKind::kPng: return read_png(path);
    case FileKind::kJpeg: return read_jpeg(path);
    default: throw IoError("unsupported image format: " + path.string());
  }
}

AlphaMask load_mask(const std::filesystem::path& path) {
  if (sniff(path) == FileKind::kPng) return read_png_gray(path);
  // JPEG masks: decode and take the red channel (gray files have R=G=B).
  LoadedImage img = load_image(path);
  AlphaMask mask(img.rgb.width(), img.rgb.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      mask.at(x, y) = img.rgb.at(x, y, 0) / 255.0f;
    }
  }
  return mask;
}

void save_png(const std::filesystem::path& path, const Raster& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.bytes().data(),
                               0, nullptr)) {
    throw IoError("png write failed: " + path.string() + ": " + image.message);
  }
}

void save_png_gray(const std::filesystem::path& path,
                   const std::vector<std::uint8_t>& pixels, int width, int height) {
  if (static_cast<std::size_t>(width) * height != pixels.size()) {
    throw ValidationError("save_png_gray: size mismatch");
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0,
                               nullptr)) {
    throw IoError("png write failed: " + path.string() + ": " + image.message);
  }
}

void save_jpeg(const std::filesystem::path& path, const Raster& img, int quality) {
  FileCloser fc{std::fopen(path.string().c_str(), "wb")};
  if (!fc.f) throw IoError("cannot open " + path.string() + " for writing");

  jpeg_compress_struct cinfo{};
  JpegErrorMgr err{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw IoError("jpeg write failed: " + path.string());
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, fc.f);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.px(0, static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace pastegen
