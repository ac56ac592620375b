// Boot: one base-URL setting (defaults to the page origin, override
// with ?gateway=http://host:port), one polling loop, one command lane.

import { GatewayClient } from "./client.js";
import { Poller, sendTurn } from "./poller.js";
import { ConsoleState } from "./state.js";
import { grabElements, render, showToast, wireControls } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("gateway") ?? window.location.origin;

const client = new GatewayClient(baseUrl);
const state = new ConsoleState();
const els = grabElements(document);

const poller = new Poller(client, state, () => render(els, state, poller.lastFrame));

async function submit(): Promise<void> {
  const text = els.chatInput.value.trim();
  if (!text) return;
  els.sendButton.disabled = true;
  try {
    await sendTurn(client, state, text);
    els.chatInput.value = ""; // sent: clear; on failure the input stays
  } catch (err) {
    showToast(els, String(err));
  }
  render(els, state, poller.lastFrame);
}

els.sendButton.addEventListener("click", () => void submit());
els.chatInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") void submit();
});
els.chatInput.addEventListener("input", () => {
  els.sendButton.disabled = els.chatInput.value.trim() === "";
});

wireControls(els, client, () => void poller.poll());
poller.start();
