#include "glaucofuse/labels.hpp"

#include "glaucofuse/error.hpp"

namespace glaucofuse {

Label parse_label(const std::string& text) {
  if (text == "glaucoma") return Label::Glaucoma;
  if (text == "normal") return Label::Normal;
  throw Error(ErrorKind::UnknownLabel, "'" + text + "'");
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::Train;
  if (text == "val") return Split::Val;
  if (text == "test") return Split::Test;
  throw Error(ErrorKind::UnknownSplit, "'" + text + "'");
}

std::string to_string(Label label) { return label == Label::Glaucoma ? "glaucoma" : "normal"; }

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "proposed") return Variant::Proposed;
  if (text == "fundus_vcdr") return Variant::FundusVcdr;
  if (text == "fundus") return Variant::Fundus;
  if (text == "mask_vcdr") return Variant::MaskVcdr;
  if (text == "mask") return Variant::Mask;
  if (text == "vcdr_logistic") return Variant::VcdrLogistic;
  throw Error(ErrorKind::InvalidConfig, "unknown variant '" + text + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Proposed: return "proposed";
    case Variant::FundusVcdr: return "fundus_vcdr";
    case Variant::Fundus: return "fundus";
    case Variant::MaskVcdr: return "mask_vcdr";
    case Variant::Mask: return "mask";
    case Variant::VcdrLogistic: return "vcdr_logistic";
  }
  return "unknown";
}

bool uses_vcdr(Variant v) {
  return v == Variant::Proposed || v == Variant::FundusVcdr || v == Variant::MaskVcdr || v == Variant::VcdrLogistic;
}

bool is_cnn(Variant v) { return v != Variant::VcdrLogistic; }

int input_channels(Variant v) {
  switch (v) {
    case Variant::Proposed: return 5;
    case Variant::VcdrLogistic: return 0;
    default: return 3;
  }
}

}  // namespace glaucofuse
