#include "scamhunt/errors.hpp"

namespace scamhunt {

MissingPriceError::MissingPriceError(std::vector<std::string> dates)
    : Error([&] {
          std::string msg = "missing price entries for:";
          for (const auto& d : dates) msg += " " + d;
          return msg;
      }()),
      dates_(std::move(dates)) {}

}  // namespace scamhunt
