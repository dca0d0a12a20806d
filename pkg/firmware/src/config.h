// Deployment configuration: edit for your classroom network.

#ifndef FLOOR_CONFIG_H
#define FLOOR_CONFIG_H

// Hub reachable from the mat's network. The Ethernet shield uses DHCP.
#define HUB_HOST "192.168.1.10"
#define HUB_PORT 8080
#define HUB_PATH "/ws"

// Segments 0-3 on digital pins D2-D5, buttons to ground, internal pull-ups.
#define SEGMENT_PINS {2, 3, 4, 5}

// Optional status LED driven by feedback frames (-1 to disable).
#define FEEDBACK_LED_PIN 13

#endif  // FLOOR_CONFIG_H
