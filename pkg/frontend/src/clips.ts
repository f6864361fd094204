// Clip inspection panel: the clips backing a clicked chart point,
// exactly as the API returned them, with pagination controls.

import type { ClipsResponse } from "./types";

export interface ClipsHandlers {
  onPage: (page: number) => void;
}

function formatMs(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const m = Math.floor(totalSeconds / 60);
  const s = totalSeconds % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}

export function renderClips(
  container: HTMLElement,
  heading: string,
  resp: ClipsResponse,
  handlers: ClipsHandlers,
): void {
  container.textContent = "";
  const title = document.createElement("h2");
  title.textContent = heading;
  container.appendChild(title);

  if (!resp.clips.length) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = resp.page > 0 ? "No more clips." : "No clips in this bucket.";
    container.appendChild(empty);
  } else {
    const list = document.createElement("ol");
    list.className = "clip-list";
    list.start = resp.page * resp.page_size + 1;
    for (const clip of resp.clips) {
      const item = document.createElement("li");
      item.className = "clip";
      item.dataset.videoId = clip.video_id;
      item.dataset.startMs = String(clip.start_ms);
      item.dataset.endMs = String(clip.end_ms);
      const head = document.createElement("div");
      head.className = "clip-head";
      head.textContent =
        `${clip.channel} · ${clip.show} · ${clip.air_utc} · ` +
        `${formatMs(clip.start_ms)}–${formatMs(clip.end_ms)}`;
      const snippet = document.createElement("p");
      snippet.className = "clip-snippet";
      snippet.textContent = clip.snippet || "(no captions nearby)";
      item.append(head, snippet);
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  const nav = document.createElement("div");
  nav.className = "clip-nav";
  const prev = document.createElement("button");
  prev.textContent = "← Prev";
  prev.disabled = resp.page === 0;
  prev.addEventListener("click", () => handlers.onPage(resp.page - 1));
  const label = document.createElement("span");
  label.textContent = `page ${resp.page + 1}`;
  const next = document.createElement("button");
  next.textContent = "Next →";
  next.disabled = resp.clips.length < resp.page_size;
  next.addEventListener("click", () => handlers.onPage(resp.page + 1));
  nav.append(prev, label, next);
  container.appendChild(nav);
}
