#pragma once

namespace schottky {

// git-describe style build identifier, embedded at configure time.
const char* version_string();

}  // namespace schottky
