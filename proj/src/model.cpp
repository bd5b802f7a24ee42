#include "cleanspread/model.hpp"

#include <algorithm>

#include "cleanspread/errors.hpp"

namespace cleanspread {

double terminal_condition(const CapParams& cap, double e) {
    if (cap.smoothing > 0.0) {
        const double w = (e - (cap.cap - cap.smoothing)) / (2.0 * cap.smoothing);
        return cap.penalty * std::clamp(w, 0.0, 1.0);
    }
    return e >= cap.cap ? cap.penalty : 0.0;
}

void ModelParams::validate() const {
    stack.validate();
    if (!(cap.horizon > 0)) throw ConfigError("cap.horizon must be > 0");
    if (!(cap.penalty > 0)) throw ConfigError("cap.penalty must be > 0");
    if (!(cap.cap >= 0)) throw ConfigError("cap.cap must be >= 0");
    if (!(cap.rate >= 0)) throw ConfigError("cap.rate must be >= 0");
    if (!(cap.smoothing >= 0)) throw ConfigError("cap.smoothing must be >= 0");
    if (!(hours_per_year > 0)) throw ConfigError("hours_per_year must be > 0");
    cleanspread::validate(demand, capacity(), cap.horizon);
    cleanspread::validate(fuels);
}

}  // namespace cleanspread
