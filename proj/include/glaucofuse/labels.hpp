#pragma once

#include <string>

namespace glaucofuse {

/// Class index used by the network: 1 is the positive (glaucoma) class.
enum class Label : int { Normal = 0, Glaucoma = 1 };

enum class Split { Train, Val, Test };

Label parse_label(const std::string& text);
Split parse_split(const std::string& text);
std::string to_string(Label label);
std::string to_string(Split split);

/// The six compared configurations.
enum class Variant { Proposed, FundusVcdr, Fundus, MaskVcdr, Mask, VcdrLogistic };

Variant parse_variant(const std::string& text);
std::string to_string(Variant v);
bool uses_vcdr(Variant v);
bool is_cnn(Variant v);
int input_channels(Variant v);

}  // namespace glaucofuse
