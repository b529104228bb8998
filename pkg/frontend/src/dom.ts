/** Tiny DOM helpers; no framework, just typed element builders. */

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child == null) continue;
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function field(labelText: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, labelText), input);
}

export function textInput(name: string, placeholder = "", type = "text"): HTMLInputElement {
  return el("input", { name, placeholder, type, autocomplete: "off" });
}

export function notice(kind: "ok" | "bad" | "info", text: string): HTMLElement {
  return el("p", { class: `notice ${kind}` }, text);
}
