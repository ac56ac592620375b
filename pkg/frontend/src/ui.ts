// DOM rendering: chat pane, workspace canvas, event feed, controls.
// All state lives in ConsoleState; this module only paints it.

import { Frame, GatewayClient, StatusSnapshot } from "./client.js";
import { ConsoleState } from "./state.js";

const FEED_LIMIT = 200;
const SAFETY_CLASSES: Record<string, string> = {
  Running: "badge-running",
  CollisionStopped: "badge-collision",
  EStopped: "badge-estop",
};

export interface Elements {
  chatLog: HTMLElement;
  chatInput: HTMLInputElement;
  sendButton: HTMLButtonElement;
  canvas: HTMLCanvasElement;
  safetyBadge: HTMLElement;
  jobLine: HTMLElement;
  eventFeed: HTMLElement;
  banner: HTMLElement;
  toast: HTMLElement;
}

export function grabElements(doc: Document): Elements {
  const get = <T extends HTMLElement>(id: string) => doc.getElementById(id) as T;
  return {
    chatLog: get("chat-log"),
    chatInput: get<HTMLInputElement>("chat-input"),
    sendButton: get<HTMLButtonElement>("send-button"),
    canvas: get<HTMLCanvasElement>("workspace"),
    safetyBadge: get("safety-badge"),
    jobLine: get("job-line"),
    eventFeed: get("event-feed"),
    banner: get("offline-banner"),
    toast: get("toast"),
  };
}

export function render(els: Elements, state: ConsoleState, frame: Frame | null): void {
  renderChat(els, state);
  renderStatus(els, state.status);
  if (frame && state.status) drawWorkspace(els.canvas, frame, state.status);
  renderFeed(els, state);
  els.banner.hidden = state.connection === "online";
  els.sendButton.disabled = els.chatInput.value.trim() === "";
}

function renderChat(els: Elements, state: ConsoleState): void {
  els.chatLog.replaceChildren(
    ...state.transcript.map((entry) => {
      const div = document.createElement("div");
      div.className = `bubble ${entry.role}`;
      div.textContent = entry.text;
      if (entry.jobId) {
        const chip = document.createElement("span");
        chip.className = "job-chip";
        chip.textContent = entry.jobId;
        div.appendChild(chip);
      }
      return div;
    }),
  );
  els.chatLog.scrollTop = els.chatLog.scrollHeight;
}

function renderStatus(els: Elements, status: StatusSnapshot | null): void {
  const safety = status?.robot.safety ?? "unknown";
  els.safetyBadge.textContent = safety;
  els.safetyBadge.className = `badge ${SAFETY_CLASSES[safety] ?? "badge-unknown"}`;
  if (!status) {
    els.jobLine.textContent = "";
    return;
  }
  const job = status.active_job
    ? `${status.active_job.job_id} (${status.active_job.state})`
    : "idle";
  els.jobLine.textContent = `job: ${job} | queue: ${status.queue_depth}`;
}

function drawWorkspace(canvas: HTMLCanvasElement, frame: Frame, status: StatusSnapshot): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const scale = Math.floor(Math.min(canvas.width / frame.width, canvas.height / frame.height));
  const image = ctx.createImageData(frame.width, frame.height);
  for (let i = 0; i < frame.pixels.length; i++) {
    const v = frame.pixels[i];
    image.data[4 * i] = v;
    image.data[4 * i + 1] = v;
    image.data[4 * i + 2] = v;
    image.data[4 * i + 3] = 255;
  }
  // paint at 1:1 offscreen, then blow it up without smoothing
  const off = document.createElement("canvas");
  off.width = frame.width;
  off.height = frame.height;
  off.getContext("2d")!.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(off, 0, 0, frame.width * scale, frame.height * scale);

  // TCP crosshair from the status snapshot, mapped through the camera
  const cam = status.camera;
  const [tx, ty] = status.robot.tcp.position;
  const px = (tx - cam.origin[0]) * cam.pixels_per_meter * scale;
  const py = (ty - cam.origin[1]) * cam.pixels_per_meter * scale;
  ctx.strokeStyle = status.robot.gripper.holding ? "#ff9a3c" : "#4cc2ff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(px - 8, py);
  ctx.lineTo(px + 8, py);
  ctx.moveTo(px, py - 8);
  ctx.lineTo(px, py + 8);
  ctx.stroke();
  // gripper aperture ring
  const aperture = status.robot.gripper.aperture * cam.pixels_per_meter * scale;
  ctx.beginPath();
  ctx.arc(px, py, Math.max(aperture / 2, 2), 0, 2 * Math.PI);
  ctx.stroke();
}

function renderFeed(els: Elements, state: ConsoleState): void {
  const recent = state.events.slice(-FEED_LIMIT);
  els.eventFeed.replaceChildren(
    ...recent.map((event) => {
      const li = document.createElement("li");
      const type = (event.payload as { type?: string }).type ?? "?";
      li.textContent = `#${event.seq} [${event.source}] ${type} ${summarize(event.payload)}`;
      return li;
    }),
  );
  els.eventFeed.scrollTop = els.eventFeed.scrollHeight;
}

function summarize(payload: Record<string, unknown>): string {
  switch (payload.type) {
    case "command":
      return `"${payload.utterance}"`;
    case "job":
      return `${payload.job} -> ${payload.state}`;
    case "dispatch":
      return `${payload.endpoint}`;
    case "control":
      return `${payload.action} -> ${payload.safety}`;
    case "qc_decision":
      return `${payload.label ?? "none"}`;
    case "trace": {
      const ev = payload.event as { type?: string } | null;
      return ev?.type ?? "";
    }
    default:
      return "";
  }
}

export function showToast(els: Elements, message: string): void {
  els.toast.textContent = message;
  els.toast.classList.add("visible");
  setTimeout(() => els.toast.classList.remove("visible"), 2500);
}

export function wireControls(
  els: Elements,
  client: GatewayClient,
  refresh: () => void,
): void {
  for (const action of ["estop", "restart", "inject_collision"] as const) {
    const button = document.getElementById(`btn-${action}`);
    button?.addEventListener("click", async () => {
      try {
        const ack = await client.control(action);
        showToast(els, `${action}: ${ack.safety}`);
      } catch (err) {
        showToast(els, String(err));
      }
      refresh();
    });
  }
}
