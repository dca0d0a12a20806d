/**
 * Browser entry point: one WebSocket to the hub at /ws on our own origin,
 * role=screen, auto-reconnect with backoff, re-render on every frame.
 */

import { applyFrame, initialView, render, type HubFrame, type ViewState } from "./view";

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 10_000;

let view: ViewState = initialView;
let reconnectAttempts = 0;

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}

function paint(): void {
  root!.innerHTML = render(view);
}

function connect(): void {
  const proto = window.location.protocol === "https:" ? "wss:" : "ws:";
  const socket = new WebSocket(`${proto}//${window.location.host}/ws`);

  socket.onopen = () => {
    reconnectAttempts = 0;
    socket.send(JSON.stringify({ type: "hello", role: "screen" }));
    view = { ...view, status: "connected" };
    paint();
  };

  socket.onmessage = (event) => {
    let frame: { type?: string };
    try {
      frame = JSON.parse(event.data);
    } catch {
      return;
    }
    if (frame.type === "question" || frame.type === "feedback" || frame.type === "finished") {
      view = applyFrame(view, frame as HubFrame);
      paint();
    }
  };

  socket.onclose = () => {
    view = { ...initialView, status: "lost" };
    paint();
    const delay = Math.min(RECONNECT_MAX_MS, RECONNECT_BASE_MS * 2 ** reconnectAttempts);
    reconnectAttempts += 1;
    setTimeout(connect, delay);
  };
}

paint();
connect();
