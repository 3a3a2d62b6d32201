#pragma once

#include <string>
#include <vector>

namespace tme {

// Text normalization used by node matching and slot derivation:
// lowercase, strip punctuation, collapse whitespace.
std::string normalize(const std::string& text);

// Normalized whitespace tokens of `text`.
std::vector<std::string> tokenize(const std::string& text);

// Derive a slot identifier from a free-text title: normalized tokens joined
// with dots ("Collect name" -> "collect.name").
std::string slot_from_title(const std::string& title);

// Human-readable title for a slot: dots become spaces, first letter upper
// ("collect.name" -> "Collect name").
std::string title_from_slot(const std::string& slot);

// Last dot-separated segment of a slot ("collect.name" -> "name").
std::string slot_tail(const std::string& slot);

} // namespace tme
