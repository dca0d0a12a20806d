// Hardware-independent core of the floor firmware: button debouncing and
// wire frame construction. The sketch feeds it raw pin reads and a
// millisecond clock; the host test harness feeds it synthetic edge traces.
//
// Buttons are wired to ground with internal pull-ups, so pressed = LOW.

#ifndef FLOOR_CORE_H
#define FLOOR_CORE_H

#include <stdio.h>

namespace floor_fw {

constexpr unsigned long kDebounceMs = 50;
constexpr int kSegmentCount = 4;

// Edge detector with debounce: reports each physical press exactly once,
// on the falling edge, regardless of contact bounce up to kDebounceMs.
class Debouncer {
 public:
  // `reading` is the raw level (true = HIGH = released). Returns true
  // exactly once per clean press.
  bool update(bool reading, unsigned long now_ms) {
    if (reading != last_reading_) {
      last_change_ms_ = now_ms;
      last_reading_ = reading;
    }
    if (now_ms - last_change_ms_ >= kDebounceMs && reading != stable_) {
      stable_ = reading;
      if (!stable_) {  // falling edge: press
        return true;
      }
    }
    return false;
  }

 private:
  bool stable_ = true;        // released
  bool last_reading_ = true;
  unsigned long last_change_ms_ = 0;
};

// Writes {"type":"press","segment":k} into `out`. Returns frame length,
// or 0 if the segment is out of range or the buffer too small.
inline int press_frame(int segment, char* out, int out_size) {
  if (segment < 0 || segment >= kSegmentCount) {
    return 0;
  }
  int n = snprintf(out, out_size, "{\"type\":\"press\",\"segment\":%d}", segment);
  return (n > 0 && n < out_size) ? n : 0;
}

inline int hello_frame(char* out, int out_size) {
  int n = snprintf(out, out_size, "{\"type\":\"hello\",\"role\":\"floor\"}");
  return (n > 0 && n < out_size) ? n : 0;
}

// Reconnect backoff: doubles from 500 ms, capped at 10 s.
inline unsigned long backoff_ms(int attempt) {
  unsigned long delay = 500;
  for (int i = 0; i < attempt && delay < 10000; ++i) {
    delay *= 2;
  }
  return delay < 10000 ? delay : 10000;
}

}  // namespace floor_fw

#endif  // FLOOR_CORE_H
